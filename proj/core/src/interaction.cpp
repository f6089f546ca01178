#include "cyl/interaction.hpp"

#include <cmath>

#include "cyl/constants.hpp"
#include "cyl/parallel.hpp"

namespace cyl {

namespace {

double U(double q) { return constants().c4 / (1.0 + q); }  // profile of squared radius

void check_t(double eps, double t) {
    if (!(eps > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (!(t > 0.0)) throw InvalidParameter("separation t must be positive");
}

BiradialDomain pair_domain(double tau) {
    BiradialDomain d;
    d.zeta_centers = {-tau, tau};
    d.core_scale = 1.0;
    return d;
}

IntegralResult reduced(InteractionKind kind, double tau, const QuadratureSpec& spec) {
    const double c4 = constants().c4;
    Fn2 F;
    switch (kind) {
        case InteractionKind::U3V:
            F = [tau](double z, double r) {
                const double up = U((z - tau) * (z - tau) + r * r), um = U((z + tau) * (z + tau) + r * r);
                return up * up * up * um;
            };
            break;
        case InteractionKind::GRAD:
            F = [tau, c4](double z, double r) {
                const double dp = 1.0 + (z - tau) * (z - tau) + r * r;
                const double dm = 1.0 + (z + tau) * (z + tau) + r * r;
                return 4.0 * c4 * c4 * ((z - tau) * (z + tau) + r * r) / (dp * dp * dm * dm);
            };
            break;
        case InteractionKind::U2V2:
            F = [tau](double z, double r) {
                const double up = U((z - tau) * (z - tau) + r * r), um = U((z + tau) * (z + tau) + r * r);
                return up * up * um * um;
            };
            break;
        case InteractionKind::FCURVE:
            throw InvalidParameter("FCURVE is not an interaction integral");
    }
    return integrate_biradial(F, pair_domain(tau), spec);
}

}  // namespace

InteractionKind parse_interaction_kind(const std::string& s) {
    if (s == "U3V") return InteractionKind::U3V;
    if (s == "GRAD") return InteractionKind::GRAD;
    if (s == "U2V2") return InteractionKind::U2V2;
    if (s == "f" || s == "FCURVE") return InteractionKind::FCURVE;
    throw InvalidParameter("unknown interaction kind: " + s);
}

std::string to_string(InteractionKind k) {
    switch (k) {
        case InteractionKind::U3V: return "U3V";
        case InteractionKind::GRAD: return "GRAD";
        case InteractionKind::U2V2: return "U2V2";
        case InteractionKind::FCURVE: return "FCURVE";
    }
    return "?";
}

QuadratureSpec interaction_default_spec() {
    QuadratureSpec s;
    s.rel_tol = 1e-12;
    s.abs_tol = 1e-18;
    s.max_subdivisions = 200000;
    return s;
}

IntegralResult interaction_integral(InteractionKind kind, double epsilon, double t, const QuadratureSpec& spec) {
    check_t(epsilon, t);
    return reduced(kind, t / epsilon, spec);
}

IntegralResult interaction_u1v3(double epsilon, double t, const QuadratureSpec& spec) {
    check_t(epsilon, t);
    const double tau = t / epsilon;
    return integrate_biradial(
        [tau](double z, double r) {
            const double up = U((z - tau) * (z - tau) + r * r), um = U((z + tau) * (z + tau) + r * r);
            return up * um * um * um;
        },
        pair_domain(tau), spec);
}

// a(t) = 12 S4 + 12 int grad U+ . grad U-,  b^2 = 2 + 8 int U+^3 U- + 6 c;
// the self terms are the closed-form normalizations.
CurvePoint curve_point(double tau, const QuadratureSpec& spec) {
    if (!(tau > 0.0)) throw InvalidParameter("separation must be positive");
    const double S4 = constants().S4;
    const IntegralResult g = reduced(InteractionKind::GRAD, tau, spec);
    const IntegralResult u = reduced(InteractionKind::U3V, tau, spec);
    const IntegralResult c = reduced(InteractionKind::U2V2, tau, spec);
    CurvePoint p{};
    p.a = 12.0 * S4 + 12.0 * g.value;
    p.a_err = 12.0 * g.error_estimate;
    p.c = c.value;
    p.c_err = c.error_estimate;
    p.b = std::sqrt(2.0 + 8.0 * u.value + 6.0 * c.value);
    p.b_err = (8.0 * u.error_estimate + 6.0 * c.error_estimate) / (2.0 * p.b);
    p.f = p.a / p.b;
    p.f_err = p.a_err / p.b + p.a * p.b_err / (p.b * p.b);
    p.converged = g.converged && u.converged && c.converged;
    return p;
}

InteractionCurves curves(double epsilon, const std::vector<double>& t_grid, const QuadratureSpec& spec,
                         int threads) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    for (double t : t_grid)
        if (!(t > 0.0)) throw InvalidParameter("t grid entries must be positive");
    const int n = static_cast<int>(t_grid.size());
    std::vector<CurvePoint> pts(n);
    parallel_for(n, threads, [&](int i) { pts[i] = curve_point(t_grid[i] / epsilon, spec); });
    InteractionCurves out;
    out.epsilon = epsilon;
    out.t_grid = t_grid;
    for (const auto& p : pts) {
        if (!p.converged) throw NumericalFailure("interaction quadrature did not converge");
        out.a.push_back(p.a);
        out.b.push_back(p.b);
        out.c.push_back(p.c);
        out.f.push_back(p.f);
        out.a_err.push_back(p.a_err);
        out.b_err.push_back(p.b_err);
        out.c_err.push_back(p.c_err);
        out.f_err.push_back(p.f_err);
    }
    return out;
}

IntegralResult a_prime_quadrature(double epsilon, double t, const QuadratureSpec& spec) {
    check_t(epsilon, t);
    const double tau = t / epsilon, c4 = constants().c4, S4 = constants().S4;
    BiradialDomain d;
    d.zeta_min = 0.0;
    d.zeta_centers = {0.0, 2.0 * tau};
    d.core_scale = 1.0;
    IntegralResult r = integrate_biradial(
        [tau, c4](double z, double rho) {
            const double q = z * z + rho * rho;
            const double dUr = -2.0 * c4 / ((1.0 + q) * (1.0 + q));  // U'(|y|)/|y|
            const double un = U((z - 2 * tau) * (z - 2 * tau) + rho * rho);
            const double uf = U((z + 2 * tau) * (z + 2 * tau) + rho * rho);
            return dUr * z * (un * un * un - uf * uf * uf);
        },
        d, spec);
    const double k = 24.0 * S4 / epsilon;
    r.value *= k;
    r.error_estimate *= k;
    return r;
}

IntegralResult c_prime_quadrature(double epsilon, double t, const QuadratureSpec& spec) {
    check_t(epsilon, t);
    const double tau = t / epsilon, c4 = constants().c4;
    BiradialDomain d;
    d.zeta_min = 0.0;
    d.zeta_centers = {0.0, 2.0 * tau};
    d.core_scale = 1.0;
    IntegralResult r = integrate_biradial(
        [tau, c4](double z, double rho) {
            const double q = z * z + rho * rho;
            const double dUr = -2.0 * c4 / ((1.0 + q) * (1.0 + q));
            const double un = U((z - 2 * tau) * (z - 2 * tau) + rho * rho);
            const double uf = U((z + 2 * tau) * (z + 2 * tau) + rho * rho);
            return dUr * z * U(q) * (un * un - uf * uf);
        },
        d, spec);
    const double k = 4.0 / epsilon;
    r.value *= k;
    r.error_estimate *= k;
    return r;
}

double default_fd_step(double t) { return std::max(1e-3, 1e-2 * t); }

double verify_b_prime_identity(double epsilon, double t, double h_fd, const QuadratureSpec& spec) {
    check_t(epsilon, t);
    if (!(h_fd > 0.0) || !(t > h_fd)) throw InvalidParameter("need t > h_fd > 0");
    const CurvePoint p = curve_point((t + h_fd) / epsilon, spec);
    const CurvePoint m = curve_point((t - h_fd) / epsilon, spec);
    const CurvePoint o = curve_point(t / epsilon, spec);
    if (!p.converged || !m.converged || !o.converged) throw NumericalFailure("interaction quadrature did not converge");
    const double S4 = constants().S4;
    const double bp = (p.b - m.b) / (2 * h_fd);
    const double ap = (p.a - m.a) / (2 * h_fd);
    const double cp = (p.c - m.c) / (2 * h_fd);
    return std::abs(bp - (2.0 / o.b) * (ap / (6.0 * S4) + 1.5 * cp));
}

MonotonicityReport verify_monotonicity(double epsilon, const std::vector<double>& t_grid, const QuadratureSpec& spec,
                                       int threads) {
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw InvalidParameter("grid must be strictly increasing");
    const int n = static_cast<int>(t_grid.size());
    MonotonicityReport rep;
    rep.rows.resize(n);
    parallel_for(n, threads, [&](int i) {
        const double t = t_grid[i];
        const double h = default_fd_step(t);
        auto at = [&](double s) { return curve_point(s / epsilon, spec); };
        const CurvePoint p1 = at(t + h), m1 = at(t - h), p2 = at(t + h / 2), m2 = at(t - h / 2);
        MonotonicityRow r{};
        r.t = t;
        const double ah = (p1.a - m1.a) / (2 * h), ah2 = (p2.a - m2.a) / h;
        const double ch = (p1.c - m1.c) / (2 * h), ch2 = (p2.c - m2.c) / h;
        r.a_fd = ah;
        r.c_fd = ch;
        // Twice the Richardson estimate 4/3 |D_h - D_{h/2}| of the step-h truncation.
        r.a_fd_err = 8.0 / 3.0 * std::abs(ah - ah2) + 2.0 * (p1.a_err + m1.a_err + p2.a_err + m2.a_err) / h;
        r.c_fd_err = 8.0 / 3.0 * std::abs(ch - ch2) + 2.0 * (p1.c_err + m1.c_err + p2.c_err + m2.c_err) / h;
        const IntegralResult aq = a_prime_quadrature(epsilon, t, spec);
        const IntegralResult cq = c_prime_quadrature(epsilon, t, spec);
        r.a_quad = aq.value;
        r.a_quad_err = aq.error_estimate;
        r.c_quad = cq.value;
        r.c_quad_err = cq.error_estimate;
        r.ok = r.a_fd < 0 && r.a_quad < 0 && r.c_fd < 0 && r.c_quad < 0 &&
               std::abs(r.a_fd - r.a_quad) <= r.a_fd_err + r.a_quad_err &&
               std::abs(r.c_fd - r.c_quad) <= r.c_fd_err + r.c_quad_err;
        rep.rows[i] = r;
    });
    for (int i = 0; i < n; ++i)
        if (!rep.rows[i].ok) {
            rep.passed = false;
            rep.first_failure = i;
            rep.message = "negativity or cross-method agreement fails at t = " + std::to_string(t_grid[i]);
            break;
        }
    return rep;
}

SlopeFit asymptotic_slope(InteractionKind kind, double epsilon, const std::vector<double>& t_sequence,
                          const QuadratureSpec& spec, int threads) {
    if (t_sequence.size() < 2) throw InvalidParameter("need at least two separations");
    for (std::size_t i = 1; i < t_sequence.size(); ++i)
        if (t_sequence[i] < 2.0 * t_sequence[i - 1] * (1 - 1e-12))
            throw InvalidParameter("t_sequence must be geometric with ratio >= 2");
    if (t_sequence.front() / epsilon < 10.0) throw InvalidParameter("smallest t/eps must be at least 10");
    const int n = static_cast<int>(t_sequence.size());
    std::vector<double> y(n), x(n);
    parallel_for(n, threads, [&](int i) {
        const double t = t_sequence[i];
        x[i] = (epsilon / t) * (epsilon / t);
        if (kind == InteractionKind::FCURVE)
            y[i] = curve_point(t / epsilon, spec).f;
        else
            y[i] = interaction_integral(kind, epsilon, t, spec).value;
    });
    // Least squares for y = limit + coeff x.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    SlopeFit fit{};
    fit.coeff = (n * sxy - sx * sy) / det;
    fit.limit = (sy - fit.coeff * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - fit.limit - fit.coeff * x[i];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.values = y;
    return fit;
}

}  // namespace cyl
