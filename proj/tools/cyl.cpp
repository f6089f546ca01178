#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

#include "cyl/acceptance.hpp"
#include "cyl/cnc.hpp"
#include "cyl/cone.hpp"
#include "cyl/constants.hpp"
#include "cyl/football.hpp"
#include "cyl/green.hpp"
#include "cyl/interaction.hpp"
#include "cyl/parallel.hpp"
#include "cyl/path.hpp"
#include "cyl/reports.hpp"

namespace fs = std::filesystem;
using namespace cyl;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Context {
    RunConfig cfg;
    fs::path out;
    Manifest manifest;
};

// Runs the given acceptance indices that the config enables, writes <prefix>_checks.*.
int finish(Context& ctx, const std::string& prefix, const std::vector<int>& indices) {
    Table t{prefix + "_checks", {"index", "name", "status", "value", "error", "detail"}, {}};
    int code = 0;
    for (int i : indices) {
        if (!ctx.cfg.enabled(i)) continue;
        const auto r = run_check(i, ctx.cfg);
        std::printf("%s\n", format_check(r).c_str());
        t.add({long(r.index), r.name, std::string(r.passed ? "PASS" : "FAIL"), r.value, r.error, r.detail});
        ctx.manifest.stage("check:" + r.name, r.seconds);
        ctx.manifest.result("check:" + r.name, r.value, r.error);
        if (!r.passed && !code) code = i;
    }
    write_table(t, ctx.out);
    ctx.manifest.write(ctx.out, prefix + "_manifest.json");
    return code;
}

int cmd_constants(Context& ctx) {
    const auto& c = constants();
    const double r6 = std::sqrt(6.0);
    Table t{"constants", {"quantity", "value", "closed_form", "rel_dev"}, {}};
    auto row = [&](const std::string& name, double v, double exact) {
        t.add({name, v, exact, std::abs(v - exact) / std::abs(exact)});
        ctx.manifest.result(name, v, std::abs(v - exact));
    };
    row("c4", c.c4, std::pow(6.0 / (pi * pi), 0.25));
    row("S4", c.S4, 8 * pi / r6);
    row("Y4", c.Y4, 6 * c.S4);
    row("Ys", c.Ys, c.Y4 / std::sqrt(2.0));
    row("A", c.A, 6 * pi * r6);
    row("B", c.B, pi * r6);
    row("B/S4", c.B / c.S4, 0.75);
    for (const auto& r : t.rows)
        std::printf("%-5s = %s\n", std::get<std::string>(r[0]).c_str(), format_number(std::get<double>(r[1])).c_str());
    std::printf("Y4 = 6 S4: %s\n", std::abs(c.Y4 - 6 * c.S4) <= 1e-14 * c.Y4 ? "yes" : "no");
    std::printf("B/S4 = 0.75: %s\n", std::abs(c.B / c.S4 - 0.75) <= 1e-15 ? "yes" : "no");
    write_table(t, ctx.out);
    return finish(ctx, "constants", {1, 12});
}

int cmd_interaction(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto spec = cfg.tuned(interaction_default_spec());
    const auto grid = cfg.bracket_points();
    const double lo = 6 * constants().S4, hi = 6 * std::sqrt(2.0) * constants().S4;
    const int n = static_cast<int>(grid.size());
    std::vector<std::vector<Cell>> rows(n);
    const auto t0 = Clock::now();
    parallel_for(n, cfg.threads, [&](int i) {
        const double t = grid[i];
        try {
            const CurvePoint p = curve_point(t, spec);
            const IntegralResult ap = a_prime_quadrature(1.0, t, spec), cp = c_prime_quadrature(1.0, t, spec);
            const double margin = std::min(p.f - lo, hi - p.f);
            const bool ok = p.converged && margin > 0 && margin >= 3 * p.f_err;
            rows[i] = {t, p.a, p.a_err, p.b, p.b_err, p.c, p.c_err, p.f, p.f_err,
                       ap.value, ap.error_estimate, cp.value, cp.error_estimate, std::string(ok ? "PASS" : "FAIL")};
        } catch (const std::exception& e) {
            const double nan = std::nan("");
            rows[i] = {t, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, std::string("error: ") + e.what()};
        }
    });
    ctx.manifest.stage("interaction-curves", since(t0));
    Table curves_t{"interaction",
                   {"t", "a", "a_err", "b", "b_err", "c", "c_err", "f", "f_err", "a_prime", "a_prime_err", "c_prime",
                    "c_prime_err", "bracket"},
                   {}};
    for (auto& r : rows) curves_t.add(std::move(r));
    write_table(curves_t, ctx.out);

    Table slopes{"interaction_slopes", {"kind", "fitted", "target", "rel_dev", "fit_residual", "status"}, {}};
    const std::pair<InteractionKind, double> targets[] = {{InteractionKind::GRAD, constants().B},
                                                          {InteractionKind::U3V, 0.75},
                                                          {InteractionKind::FCURVE, -6 * std::sqrt(2.0) * constants().B}};
    for (const auto& [kind, target] : targets) {
        const auto fit = asymptotic_slope(kind, 1.0, cfg.slope_t, spec, cfg.threads);
        const double dev = std::abs(fit.coeff - target) / std::abs(target);
        const double tol = kind == InteractionKind::FCURVE ? 0.05 : 0.02;
        slopes.add({to_string(kind), fit.coeff, target, dev, fit.residual, std::string(dev < tol ? "PASS" : "FAIL")});
        ctx.manifest.result("slope:" + to_string(kind), fit.coeff, fit.residual);
    }
    write_table(slopes, ctx.out);

    const auto mono = verify_monotonicity(1.0, cfg.monotonicity_grid, spec, cfg.threads);
    Table mt{"monotonicity",
             {"t", "a_fd", "a_fd_err", "a_quad", "a_quad_err", "c_fd", "c_fd_err", "c_quad", "c_quad_err", "status"},
             {}};
    for (const auto& r : mono.rows)
        mt.add({r.t, r.a_fd, r.a_fd_err, r.a_quad, r.a_quad_err, r.c_fd, r.c_fd_err, r.c_quad, r.c_quad_err,
                std::string(r.ok ? "PASS" : "FAIL")});
    write_table(mt, ctx.out);
    return finish(ctx, "interaction", {2, 3, 4, 5});
}

int cmd_green(Context& ctx) {
    const auto& cfg = ctx.cfg;
    GreenResolution res;
    res.harmonic_cutoff = cfg.harmonic_cutoff;
    res.radial_nodes = cfg.radial_nodes;
    Table t{"green", {"geometry", "t", "A", "A_error", "A_4t2", "exact", "nu"}, {}};

    auto flat = std::make_shared<FlatField>();
    const double d = cfg.flat_delta;
    const auto G = solve_dirichlet_green(GreenProblem{flat, Vec4::Zero(), d, res});
    MassOptions mo;
    mo.eps0 = d / 10;
    const auto m = extract_mass([&](const Vec4& y) { return G(y); }, flat, Vec4::Zero(), mo);
    t.add({std::string("flat-ball"), 0.0, m.A, m.error, std::nan(""), -1.0 / (d * d), std::nan("")});

    SweepOptions opt;
    opt.resolution = res;
    opt.threads = cfg.threads;
    opt.epsilon = cfg.epsilon;
    opt.b = cfg.b;
    const auto t0 = Clock::now();
    for (const auto& e : mass_divergence_sweep(flat, cfg.green_t, d, opt)) {
        const double d2 = d * d, t2 = e.t * e.t;
        const double exact = 1 / (4 * t2) - d2 / ((d2 - t2) * (d2 - t2)) - d2 / ((d2 + t2) * (d2 + t2));
        t.add({std::string("flat-cone"), e.t, e.A, e.A_error, e.product, exact, e.nu});
    }
    ctx.manifest.stage("green:flat-cone", since(t0));
    opt.datum.kind = DatumKind::Global;
    const auto t1 = Clock::now();
    for (const auto& e : mass_divergence_sweep(FootballModel(cfg.delta).lifted_field(), cfg.green_t, cfg.football_ball(), opt))
        t.add({std::string("football"), e.t, e.A, e.A_error, e.product, FootballModel::mass(e.t), e.nu});
    ctx.manifest.stage("green:football", since(t1));
    write_table(t, ctx.out);

    const auto fit = parametrix_scaling(FootballModel(cfg.delta).lifted_field(), cfg.parametrix_t, cfg.threads);
    Table p{"parametrix", {"t", "sup_residual"}, {}};
    for (std::size_t i = 0; i < fit.t.size(); ++i) p.add({fit.t[i], fit.sup[i]});
    write_table(p, ctx.out);
    ctx.manifest.result("parametrix_exponent", fit.exponent, 0.0);
    return finish(ctx, "green", {8, 9});
}

int cmd_cnc(Context& ctx) {
    auto field = FootballModel(ctx.cfg.delta).lifted_field();
    const Vec4 x(0.3, 0.2, 0.0, 0.1);
    Table t{"cnc", {"route", "h", "R", "Ric", "dR", "sym_dRic", "max"}, {}};
    for (auto [route, name] : {std::pair{CNCRoute::Chart, "chart"}, std::pair{CNCRoute::ExactNormal, "exact"}})
        for (double h : ctx.cfg.cnc_h) {
            const auto r = verify_cnc(field, x, h, {}, route);
            t.add({std::string(name), h, r.R, r.Ric, r.dR, r.sym_dRic, r.max()});
        }
    write_table(t, ctx.out);
    return finish(ctx, "cnc", {6});
}

int cmd_gauge(Context& ctx) {
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = 0.3;
    Q(1, 2) = Q(2, 1) = 0.2;
    Q(3, 3) = -0.1;
    const auto f = LinkFunction::quadratic(Q);
    Table t{"gauge", {"family", "h", "residual", "derivative_norm"}, {}};
    for (const auto& fam : {LinkFamily::orbifold_gauge(f), LinkFamily::exact(Link::RP3)})
        for (double h : ctx.cfg.gauge_h) {
            const auto r = verify_first_order_identity(f, fam, h);
            t.add({fam.name, h, r.residual, r.derivative_norm});
        }
    write_table(t, ctx.out);
    return finish(ctx, "gauge", {7});
}

int cmd_path(Context& ctx) {
    const auto& cfg = ctx.cfg;
    PathOptions opt;
    opt.epsilon = cfg.epsilon;
    opt.alpha = cfg.alpha;
    opt.omega = cfg.omega;
    opt.delta = cfg.delta;
    opt.points = cfg.path_points;
    opt.threads = cfg.threads;
    opt.spec = cfg.tuned(path_default_spec());
    if (cfg.calibrate) {
        const auto t0 = Clock::now();
        const auto cal = calibrate_epsilon(cfg.fit_epsilons.front(), 0.5, 5, 0.01, cfg.alpha, cfg.omega, cfg.delta,
                                           opt.spec, cfg.threads);
        Table ct{"calibration", {"epsilon", "A_local"}, {}};
        for (std::size_t i = 0; i < cal.epsilons.size(); ++i) ct.add({cal.epsilons[i], cal.A_local[i]});
        write_table(ct, ctx.out);
        ctx.manifest.stage("calibration", since(t0));
        opt.epsilon = cal.epsilon;
    }
    const auto prof = build_path(opt);
    ctx.manifest.stage("path", prof.seconds);

    Table t{"path",
            {"mu", "leg", "variant", "epsilon", "t", "s", "tau", "lambda", "Q", "Q_error", "numerator",
             "numerator_error", "denominator", "denominator_error", "converged"},
            {}};
    std::vector<std::vector<double>> lx(5), ly(5), le(5);
    for (std::size_t i = 0; i < prof.mu.size(); ++i) {
        const auto& d = prof.descriptors[i];
        const auto& q = prof.values[i];
        const int leg = std::min(4, static_cast<int>(std::floor(prof.mu[i])));
        t.add({prof.mu[i], long(leg + 1), to_string(d.variant), d.epsilon, d.t, d.s, d.tau, d.lambda, q.Q, q.error,
               q.numerator, q.numerator_error, q.denominator, q.denominator_error, long(q.converged)});
        // Points on a leg boundary belong to both legs.
        for (int l = 0; l < 5; ++l)
            if (prof.mu[i] >= l - 1e-12 && prof.mu[i] <= l + 1 + 1e-12) {
                lx[l].push_back(prof.mu[i]);
                ly[l].push_back(q.Q);
                le[l].push_back(q.error);
            }
    }
    write_table(t, ctx.out);
    for (int l = 0; l < 5; ++l) write_plot_data(ctx.out / fmt::format("path_leg{}.dat", l + 1), lx[l], ly[l], le[l]);

    const double Y = 6 * constants().S4;
    Table s{"path_summary", {"quantity", "value", "error"}, {}};
    s.add({std::string("epsilon"), opt.epsilon, 0.0});
    s.add({std::string("max_Q"), prof.max_Q, prof.max_error});
    s.add({std::string("argmax_mu"), prof.mu[prof.argmax], 0.0});
    s.add({std::string("margin_below_6S4"), Y - prof.max_Q, prof.max_error});
    s.add({std::string("Q_start"), prof.values.front().Q, prof.values.front().error});
    s.add({std::string("Q_end"), prof.values.back().Q, prof.values.back().error});
    s.add({std::string("Ys"), constants().Ys, 0.0});
    for (std::size_t k = 0; k < prof.transition_gaps.size(); ++k)
        s.add({fmt::format("l4_gap_mu{}", k + 1), prof.transition_gaps[k], 0.0});
    write_table(s, ctx.out);
    ctx.manifest.result("max_Q", prof.max_Q, prof.max_error);
    std::printf("max Q = %s +- %s (6 S4 = %s)\n", format_number(prof.max_Q).c_str(),
                format_number(prof.max_error).c_str(), format_number(Y).c_str());

    Table pts{"expansion_points", {"leg", "epsilon", "Q", "Q_error"}, {}};
    Table fits{"expansion_fit", {"leg", "lambda", "A_hat", "A_error", "residual", "exponent", "C_free", "A_target"}, {}};
    for (FitLeg leg : {FitLeg::Double, FitLeg::Interp}) {
        const auto t0 = Clock::now();
        const auto f =
            fit_expansion_A(leg, cfg.fit_epsilons, cfg.alpha, cfg.omega, cfg.delta, cfg.fit_lambda, opt.spec, cfg.threads);
        ctx.manifest.stage("fit:" + to_string(leg), since(t0));
        for (std::size_t i = 0; i < f.epsilon.size(); ++i) pts.add({to_string(leg), f.epsilon[i], f.Q[i], f.Q_error[i]});
        fits.add({to_string(leg), f.lambda, f.A_hat, f.A_error, f.residual, f.exponent, f.C_free, constants().A});
        ctx.manifest.result("A_hat:" + to_string(leg), f.A_hat, f.A_error);
        std::printf("fitted A (%s) = %.6f, free exponent %.4f\n", to_string(leg).c_str(), f.A_hat, f.exponent);
    }
    write_table(pts, ctx.out);
    write_table(fits, ctx.out);
    return finish(ctx, "path", {10, 11});
}

int cmd_accept(Context& ctx) {
    std::vector<int> all;
    for (int i = 1; i <= acceptance_count; ++i) all.push_back(i);
    return finish(ctx, "acceptance", all);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyl: bubbles, Green functions and min-max paths on a Z2-conical football"};
    app.require_subcommand(1);
    std::string config_path, out_flag;
    std::optional<int> threads;
    std::optional<double> tol_scale;
    app.add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_flag, "output directory (fallback: CYL_OUT_DIR)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol-scale", tol_scale, "multiplier for every quadrature tolerance")->check(CLI::PositiveNumber);
    app.fallthrough();

    const std::pair<const char*, int (*)(Context&)> commands[] = {
        {"constants", cmd_constants},  {"interaction-sweep", cmd_interaction}, {"green-sweep", cmd_green},
        {"cnc-verify", cmd_cnc},       {"gauge-verify", cmd_gauge},            {"path-profile", cmd_path},
        {"accept", cmd_accept}};
    const char* help[] = {"closed-form constants",
                          "double-bubble interaction curves, slopes and monotonicity",
                          "Green function mass sweeps and the parametrix law",
                          "conformal normal coordinate residuals on the round chart",
                          "first-order gauge identity on RP3",
                          "min-max path profile and expansion fits",
                          "full acceptance suite"};
    int (*selected)(Context&) = nullptr;
    for (std::size_t i = 0; i < std::size(commands); ++i)
        app.add_subcommand(commands[i].first, help[i])->callback([&selected, fn = commands[i].second] { selected = fn; });

    CLI11_PARSE(app, argc, argv);
    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (threads) cfg.threads = *threads;
        if (tol_scale) cfg.tol_scale = *tol_scale;
        cfg.validate();
        Context ctx{cfg, resolve_out_dir(out_flag, cfg), Manifest(cfg)};
        return selected(ctx);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cyl: %s\n", e.what());
        return 100;
    }
}
