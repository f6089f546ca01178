#include "cyl/acceptance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cyl/cnc.hpp"
#include "cyl/cone.hpp"
#include "cyl/constants.hpp"
#include "cyl/football.hpp"
#include "cyl/green.hpp"
#include "cyl/interaction.hpp"
#include "cyl/path.hpp"

namespace cyl {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CheckResult constants_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 1e-15;
    spec = cfg.tuned(spec);
    const IntegralResult I = integrate_radial([](double r) { return r * r * r / std::pow(1 + r * r, 4); }, inf, spec);
    const double c4 = std::pow(2 * pi * pi * I.value, -0.25);
    const double S4 = 8.0 / (c4 * c4);
    const double B = pi * pi * c4 * c4;
    const double A = 6.0 * B;
    const double dev = std::max({rel(c4, std::pow(6.0 / (pi * pi), 0.25)), rel(S4, 8 * pi / std::sqrt(6.0)),
                                 rel(A, 6 * pi * std::sqrt(6.0)), rel(B, pi * std::sqrt(6.0))});
    const auto& lib = constants();
    const double lib_dev = std::max({rel(lib.c4, c4), rel(lib.S4, S4), rel(lib.A, A), rel(lib.B, B)});
    const double ratio = lib.B / lib.S4;
    CheckResult r;
    r.value = dev;
    r.error = I.error_estimate;
    r.seconds = since(t0);
    r.passed = I.converged && dev < 1e-12 && lib_dev < 1e-12 && std::abs(ratio - 0.75) < 1e-15 && r.seconds < 1.0;
    r.detail = fmt::format("max rel dev {:.2e} (library {:.2e}), B/S4 = {:.17g}, S4 = {:.12f}{}", dev, lib_dev, ratio,
                           lib.S4, I.converged ? "" : ", integral not converged");
    return r;
}

CheckResult bracket_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto grid = cfg.bracket_points();
    const auto cv = curves(1.0, grid, cfg.tuned(interaction_default_spec()), cfg.threads);
    const double lo = 6 * constants().S4, hi = 6 * std::sqrt(2.0) * constants().S4;
    double worst = inf, max_err = 0;
    bool ok = grid.size() == 15;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double margin = std::min(cv.f[i] - lo, hi - cv.f[i]);
        worst = std::min(worst, margin / std::max(cv.f_err[i], 1e-300));
        max_err = std::max(max_err, cv.f_err[i]);
        ok = ok && margin > 0 && margin >= 3 * cv.f_err[i];
    }
    CheckResult r;
    r.seconds = since(t0);
    r.passed = ok && r.seconds < 120;
    r.value = worst;
    r.error = max_err;
    r.detail = fmt::format("{} points, min margin/error {:.3g}, max error {:.2e}", grid.size(), worst, max_err);
    return r;
}

CheckResult slopes_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto spec = cfg.tuned(interaction_default_spec());
    const auto grad = asymptotic_slope(InteractionKind::GRAD, 1.0, cfg.slope_t, spec, cfg.threads);
    const auto u3v = asymptotic_slope(InteractionKind::U3V, 1.0, cfg.slope_t, spec, cfg.threads);
    const auto fc = asymptotic_slope(InteractionKind::FCURVE, 1.0, cfg.slope_t, spec, cfg.threads);
    const double target_f = -6 * std::sqrt(2.0) * constants().B;
    const double dg = rel(grad.coeff, 7.6953), du = rel(u3v.coeff, 0.75), df = rel(fc.coeff, target_f);
    CheckResult r;
    r.seconds = since(t0);
    r.passed = dg < 0.02 && du < 0.02 && df < 0.05 && r.seconds < 120;
    r.value = std::max({dg / 0.02, du / 0.02, df / 0.05});
    r.detail = fmt::format("GRAD {:.5f} (rel {:.2e}), U3V {:.5f} (rel {:.2e}), FCURVE {:.4f} vs {:.4f} (rel {:.2e})",
                           grad.coeff, dg, u3v.coeff, du, fc.coeff, target_f, df);
    return r;
}

CheckResult identity_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto spec = cfg.tuned(interaction_default_spec());
    const double h = cfg.identity_h;
    bool ok = true;
    double worst = 0, worst_ratio = inf;
    std::string parts;
    for (double t : cfg.identity_t) {
        const double r1 = verify_b_prime_identity(1.0, t, h, spec);
        const double r2 = verify_b_prime_identity(1.0, t, h / 2, spec);
        const double ratio = r1 / r2;
        ok = ok && r1 < 1e-5 && ratio > 3.0 && ratio < 5.0;
        worst = std::max(worst, r1);
        worst_ratio = std::min(worst_ratio, ratio);
        parts += fmt::format(" t={}: {:.2e} -> {:.2e} (x{:.2f})", t, r1, r2, ratio);
    }
    CheckResult r;
    r.seconds = since(t0);
    r.passed = ok;
    r.value = worst;
    r.detail = "residual at h, h/2:" + parts;
    return r;
}

CheckResult monotonicity_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto rep = verify_monotonicity(1.0, cfg.monotonicity_grid, cfg.tuned(interaction_default_spec()), cfg.threads);
    double amax = -inf, cmax = -inf;
    for (const auto& row : rep.rows) {
        amax = std::max({amax, row.a_fd, row.a_quad});
        cmax = std::max({cmax, row.c_fd, row.c_quad});
    }
    CheckResult r;
    r.seconds = since(t0);
    r.passed = rep.passed;
    r.value = std::max(amax, cmax);
    r.detail = rep.passed ? fmt::format("{} points, max a' {:.3e}, max c' {:.3e}", rep.rows.size(), amax, cmax)
                          : rep.message;
    return r;
}

CheckResult cnc_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    auto field = FootballModel(cfg.delta).lifted_field();
    const Vec4 x(0.3, 0.2, 0.0, 0.1);
    auto hs = cfg.cnc_h;
    std::sort(hs.begin(), hs.end(), std::greater<>());
    auto fbar_deviation = [](const CNCFactor& f) {
        double d = (f.quad - 0.5 * Mat4::Identity()).cwiseAbs().maxCoeff();
        for (double v : f.cubic) d = std::max(d, std::abs(v));
        return d;
    };
    std::vector<double> res;
    double chart_fbar = 0;
    for (double h : hs) {
        const auto c = verify_cnc(field, x, h, {}, CNCRoute::Chart);
        res.push_back(c.max());
        chart_fbar = std::max(chart_fbar, fbar_deviation(c.factor));
    }
    const auto ex = verify_cnc(field, x, hs.back(), {}, CNCRoute::ExactNormal);
    const double exact = ex.max(), fbar_dev = fbar_deviation(ex.factor);
    const double order = hs.size() > 1 ? loglog_slope(hs, res) : 0.0;
    const double at_1e3 = std::abs(hs.back() - 1e-3) < 1e-15 ? res.back() : verify_cnc(field, x, 1e-3, {}, CNCRoute::Chart).max();
    CheckResult r;
    r.seconds = since(t0);
    r.passed = hs.size() > 1 && at_1e3 < 1e-3 && std::abs(order - 2.0) < 0.2 && fbar_dev < 1e-10 &&
               chart_fbar < 1e-3 && exact < 1e-3 && r.seconds < 60;
    r.value = at_1e3;
    r.detail = fmt::format(
        "chart residual {:.2e} at h=1e-3, order {:.3f}, exact route {:.1e}; fbar - |z|^2/2: {:.1e} exact, {:.1e} chart",
        at_1e3, order, exact, fbar_dev, chart_fbar);
    return r;
}

CheckResult gauge_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = 0.3;
    Q(1, 2) = Q(2, 1) = 0.2;
    Q(3, 3) = -0.1;
    const auto f = LinkFunction::quadratic(Q);
    const auto fam = LinkFamily::orbifold_gauge(f);
    auto hs = cfg.gauge_h;
    std::sort(hs.begin(), hs.end(), std::greater<>());
    std::vector<double> res;
    double deriv = 0;
    for (double h : hs) {
        const auto rep = verify_first_order_identity(f, fam, h);
        res.push_back(rep.residual);
        deriv = std::max(deriv, rep.derivative_norm);
    }
    const double order = hs.size() > 1 ? loglog_slope(hs, res) : 0.0;
    CheckResult r;
    r.seconds = since(t0);
    r.passed = hs.size() > 1 && std::abs(order - 2.0) < 0.2 && deriv < 1e-3;
    r.value = deriv;
    r.detail = fmt::format("residual {:.2e} at h={}, order {:.3f}, post-gauge derivative {:.2e}", res.back(), hs.back(),
                           order, deriv);
    return r;
}

CheckResult green_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    GreenResolution res;
    res.harmonic_cutoff = cfg.harmonic_cutoff;
    res.radial_nodes = cfg.radial_nodes;

    auto flat = std::make_shared<FlatField>();
    const double d = cfg.flat_delta;
    const auto G = solve_dirichlet_green(GreenProblem{flat, Vec4::Zero(), d, res});
    MassOptions mo;
    mo.eps0 = d / 10;
    const auto centered = extract_mass([&](const Vec4& y) { return G(y); }, flat, Vec4::Zero(), mo);
    const double centered_dev = std::abs(centered.A + 1.0 / (d * d));

    const double t_min = *std::min_element(cfg.green_t.begin(), cfg.green_t.end());
    SweepOptions cone_opt;
    cone_opt.resolution = res;
    cone_opt.threads = cfg.threads;
    const auto cone = mass_divergence_sweep(flat, cfg.green_t, d, cone_opt);

    SweepOptions fb_opt = cone_opt;
    fb_opt.datum.kind = DatumKind::Global;
    const auto fb = mass_divergence_sweep(FootballModel(cfg.delta).lifted_field(), cfg.green_t, cfg.football_ball(), fb_opt);

    auto smallest = [&](const std::vector<GreenExpansion>& s) {
        return *std::min_element(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    };
    const auto c = smallest(cone), f = smallest(fb);
    auto in_band = [](double p) { return p >= 0.95 && p <= 1.05; };
    CheckResult r;
    r.seconds = since(t0);
    r.passed = centered_dev < 1e-6 && t_min <= 0.05 * d && t_min <= 0.05 * cfg.football_ball() && in_band(c.product) &&
               in_band(f.product) && r.seconds < 600;
    r.value = std::max(std::abs(c.product - 1), std::abs(f.product - 1));
    r.error = std::max(c.A_error * 4 * c.t * c.t, f.A_error * 4 * f.t * f.t);
    r.detail = fmt::format("centered mass {:.12f} (dev {:.1e}); at t={}: cone A*4t^2 {:.6f}, football {:.6f}", centered.A,
                           centered_dev, t_min, c.product, f.product);
    return r;
}

CheckResult parametrix_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto fit = parametrix_scaling(FootballModel(cfg.delta).lifted_field(), cfg.parametrix_t, cfg.threads);
    CheckResult r;
    r.seconds = since(t0);
    r.passed = fit.exponent >= -2.3 && fit.exponent <= -1.7;
    r.value = fit.exponent;
    r.detail = fmt::format("fitted exponent {:.4f}, constant {:.4g}", fit.exponent, fit.constant);
    return r;
}

CheckResult path_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    PathOptions opt;
    opt.alpha = cfg.alpha;
    opt.omega = cfg.omega;
    opt.delta = cfg.delta;
    opt.points = cfg.path_points;
    opt.threads = cfg.threads;
    opt.spec = cfg.tuned(path_default_spec());
    opt.epsilon = cfg.epsilon;
    if (cfg.calibrate) {
        const auto cal = calibrate_epsilon(cfg.fit_epsilons.front(), 0.5, 5, 0.01, cfg.alpha, cfg.omega, cfg.delta,
                                           opt.spec, cfg.threads);
        opt.epsilon = cal.epsilon;
    }
    const auto prof = build_path(opt);
    const double Y = 6 * constants().S4;
    const double margin = Y - prof.max_Q;
    const double ends = std::max(std::abs(prof.values.front().Q - constants().Ys),
                                 std::abs(prof.values.back().Q - constants().Ys));
    CheckResult r;
    r.seconds = since(t0);
    r.passed = margin > 0 && margin >= 3 * prof.max_error && ends < 0.5 && r.seconds < 1800;
    r.value = margin;
    r.error = prof.max_error;
    r.detail = fmt::format("eps {:.3g}: max Q {:.12f} at mu={:.3f}, margin {:.3e}, max error {:.2e}, endpoint dev {:.2e}",
                           opt.epsilon, prof.max_Q, prof.mu[prof.argmax], margin, prof.max_error, ends);
    return r;
}

CheckResult expansion_check(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const auto spec = cfg.tuned(path_default_spec());
    const double target = constants().A, p_target = 2 * (1 - cfg.alpha);
    bool ok = true;
    double worst = 0;
    std::string parts;
    for (FitLeg leg : {FitLeg::Double, FitLeg::Interp}) {
        const auto fit =
            fit_expansion_A(leg, cfg.fit_epsilons, cfg.alpha, cfg.omega, cfg.delta, cfg.fit_lambda, spec, cfg.threads);
        const double dA = rel(fit.A_hat, target), dp = rel(fit.exponent, p_target);
        ok = ok && dA < 0.1 && dp < 0.1;
        worst = std::max({worst, dA, dp});
        parts += fmt::format("{}{}: A {:.4f} +- {:.1e}, exponent {:.4f}", parts.empty() ? "" : "; ", to_string(leg),
                             fit.A_hat, fit.A_error, fit.exponent);
    }
    CheckResult r;
    r.seconds = since(t0);
    r.passed = ok;
    r.value = worst;
    r.detail = parts + fmt::format(" (targets {:.4f}, {:.2f})", target, p_target);
    return r;
}

CheckResult energy_check(const RunConfig&) {
    const auto t0 = Clock::now();
    const double e10 = energy_level(1, 0), e01 = energy_level(0, 1), e20 = energy_level(2, 0);
    const auto& c = constants();
    CheckResult r;
    r.seconds = since(t0);
    r.passed = e10 < e01 && std::abs(e20 - e01) <= 1e-12 * e01 && rel(e10, c.Ys) < 1e-12 && rel(e01, c.Y4) < 1e-12;
    r.value = e01 - e10;
    r.detail = fmt::format("E(1,0) = {:.6f} < E(0,1) = {:.6f}, E(2,0) - E(0,1) = {:.1e}", e10, e01, e20 - e01);
    return r;
}

}  // namespace

std::string check_name(int index) {
    static const char* names[] = {"constants",    "bracket",      "slopes", "b-identity",
                                  "monotonicity", "cnc",          "gauge",  "green-mass",
                                  "parametrix",   "path",         "expansion-A", "energy-levels"};
    if (index < 1 || index > acceptance_count) throw InvalidParameter("acceptance index out of range");
    return names[index - 1];
}

CheckResult run_check(int index, const RunConfig& cfg) {
    using Fn = CheckResult (*)(const RunConfig&);
    static const Fn fns[] = {constants_check, bracket_check,    slopes_check, identity_check,
                             monotonicity_check, cnc_check,     gauge_check,  green_check,
                             parametrix_check, path_check,      expansion_check, energy_check};
    const std::string name = check_name(index);
    const auto t0 = Clock::now();
    CheckResult r;
    try {
        r = fns[index - 1](cfg);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
        r.seconds = since(t0);
    }
    r.index = index;
    r.name = name;
    return r;
}

std::vector<CheckResult> run_acceptance(const RunConfig& cfg) {
    std::vector<CheckResult> out;
    for (int i = 1; i <= acceptance_count; ++i)
        if (cfg.enabled(i)) out.push_back(run_check(i, cfg));
    return out;
}

int exit_code(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return r.index;
    return 0;
}

std::string format_check(const CheckResult& r) {
    return fmt::format("{} [{:2d}] {:<14} {} ({:.2f}s)", r.passed ? "PASS" : "FAIL", r.index, r.name, r.detail,
                       r.seconds);
}

}  // namespace cyl
