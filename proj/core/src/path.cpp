#include "cyl/path.hpp"

#include <array>
#include <chrono>
#include <cmath>

#include "cyl/bubbles.hpp"
#include "cyl/cnc.hpp"
#include "cyl/constants.hpp"
#include "cyl/green.hpp"
#include "cyl/parallel.hpp"

namespace cyl {

namespace {

using Vec3 = Eigen::Vector3d;
// Points of S^4 reduced by the O(3) symmetry on (X2, X3, X4): (X0, X1, |X''|).
using Y3 = std::array<Dual2, 3>;

double bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// C^inf step: 0 for x <= -1/2, 1 for x >= 1/2, S(x) + S(-x) = 1.
Dual2 smooth_step(Dual2 x) {
    const double a = bump(x.v + 0.5), b = bump(0.5 - x.v);
    if (b == 0.0) return Dual2(1.0);
    if (a == 0.0) return Dual2(0.0);
    const double da = a / ((x.v + 0.5) * (x.v + 0.5)), db = -b / ((0.5 - x.v) * (0.5 - x.v));
    const double s = a + b;
    return apply(x, a / s, (da * b - a * db) / (s * s));
}

// 1 on [0, delta], 0 beyond 2 delta.
Dual2 chi(Dual2 r, double delta) {
    if (std::isinf(delta)) return Dual2(1.0);
    return smooth_step((1.5 * delta - r) / delta);
}

Dual2 bubble_sq(Dual2 r2, double eps) { return constants().c4 * eps / (eps * eps + r2); }

Dual2 chord_sq(const Y3& Y, const Vec3& P) {
    Dual2 s(0.0);
    for (int i = 0; i < 3; ++i) {
        const Dual2 d = Y[i] - P(i);
        s = s + d * d;
    }
    return s;
}

Dual2 distance_from_chord_sq(Dual2 c2) { return 2.0 * asin(0.5 * sqrt(c2)); }

// Distance rho(d) of the conformal metric e^{F(d)} g_round along radial
// geodesics, F(d) = phi_T(d) d^2 / 2.
class RhoMap {
public:
    RhoMap() = default;
    explicit RhoMap(double T) : T_(T) {
        r1_ = inner(0.25 * T_);
        r2_ = r1_ + middle(0.5 * T_);
    }

    double F(double d, double* dF) const {
        double ph[3];
        cutoff_profile(d, T_, ph);
        if (dF) *dF = ph[1] * 0.5 * d * d + ph[0] * d;
        return ph[0] * 0.5 * d * d;
    }
    Dual2 F(Dual2 d) const {
        double dF;
        const double f = F(d.v, &dF);
        return apply(d, f, dF);
    }

    double rho(double d) const {
        if (d <= 0.25 * T_) return inner(d);
        if (d <= 0.5 * T_) return r1_ + middle(d);
        return r2_ + (d - 0.5 * T_);
    }
    Dual2 rho(Dual2 d) const { return apply(d, rho(d.v), std::exp(0.5 * F(d.v, nullptr))); }

    double inverse(double r) const {
        double lo = 0.0, hi = std::max(r, 1e-300);
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rho(mid) < r ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    static double inner(double d) {
        // int_0^d e^{r^2/4} dr
        double term = d, s = 0.0;
        const double q = 0.25 * d * d;
        for (int k = 0; k < 30; ++k) {
            s += term / (2 * k + 1);
            term *= q / (k + 1);
            if (term < 1e-18 * s) break;
        }
        return s;
    }
    double middle(double d) const {
        const double a = 0.25 * T_, b = std::min(d, 0.5 * T_);
        if (b <= a) return 0.0;
        const GaussRule& g = gauss_legendre(24);
        double s = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
            s += g.w[i] * std::exp(0.5 * F(r, nullptr));
        }
        return 0.5 * (b - a) * s;
    }

    double T_ = 1.0, r1_ = 0.0, r2_ = 0.0;
};

bool has_glued(const TestFunctionDescriptor& d) {
    return d.variant == TestVariant::Glued || d.variant == TestVariant::Interp;
}
bool has_double(const TestFunctionDescriptor& d) { return d.variant != TestVariant::Glued; }

class Lifted {
public:
    explicit Lifted(const TestFunctionDescriptor& d) : d_(d) {
        if (has_glued(d)) {
            rho_ = RhoMap(d.T);
            q_ = Vec3(std::cos(d.s), std::sin(d.s), 0.0);
            iq_ = Vec3(q_(0), -q_(1), 0.0);
        }
    }

    Dual2 operator()(const Y3& Y) const {
        switch (d_.variant) {
            case TestVariant::Single:
            case TestVariant::Double: return d_.amplitude * doubled(Y);
            case TestVariant::Glued: return d_.amplitude * glued(Y);
            case TestVariant::Interp: return d_.amplitude * (d_.lambda * glued(Y) + (1.0 - d_.lambda) * doubled(Y));
        }
        return Dual2(0.0);
    }

private:
    Dual2 doubled(const Y3& Y) const {
        const Dual2 rp = sqrt(Y[1] * Y[1] + Y[2] * Y[2]);
        const Dual2 r = atan2(rp, d_.pole * Y[0]);
        const Dual2 cut = chi(r, d_.delta);
        if (cut.v == 0.0 && cut.d0 == 0.0 && cut.d1 == 0.0) return Dual2(0.0);
        const double eps = d_.epsilon;
        if (d_.variant == TestVariant::Single || d_.t == 0.0) {
            const double k = d_.variant == TestVariant::Single ? 1.0 : 2.0;
            return k * bubble_sq(r * r, eps) * cut;
        }
        const Dual2 c = Y[1] / rp, t = d_.t;
        const Dual2 base = r * r + t * t, cross = 2.0 * t * r * c;
        return (bubble_sq(base - cross, eps) + bubble_sq(base + cross, eps)) * cut;
    }

    Dual2 glued(const Y3& Y) const {
        const Dual2 c1 = chord_sq(Y, q_), c2 = chord_sq(Y, iq_);
        const Dual2 d1 = distance_from_chord_sq(c1), d2 = distance_from_chord_sq(c2);
        const Dual2 f = rho_.F(d1) + rho_.F(d2);
        const Dual2 rho = rho_.rho(d1.v <= d2.v ? d1 : d2);
        const double tau = d_.tau;
        Dual2 w;
        if (rho.v <= tau) {
            w = bubble_sq(rho * rho, d_.epsilon);
        } else {
            const Dual2 G = exp(-0.5 * f) * (1.0 / c1 + 1.0 / c2);
            if (rho.v < 2.0 * tau) {
                const Dual2 beta = G - 1.0 / (rho * rho) - d_.A_q;
                w = (G - chi(rho, tau) * beta) / d_.nu_match;
            } else {
                w = G / d_.nu_match;
            }
        }
        return exp(0.5 * f) * w;
    }

    TestFunctionDescriptor d_;
    RhoMap rho_;
    Vec3 q_, iq_;
};

// Geodesic polar coordinates (d, psi) about Q on S^4 for O(3)-invariant
// integrands; with `partition`, an involution-adapted weight eta (eta + eta o i = 1)
// replaces integration over a fundamental domain.
struct PolarFrame {
    Vec3 Q, e, e2{0.0, 0.0, 1.0};
    bool partition = false;
    double sin_s = 1.0;
    std::vector<double> d_breaks, psi_breaks;

    Y3 point(double d, double psi) const {
        const Dual2 D(d, 1.0, 0.0), P(psi, 0.0, 1.0);
        const Dual2 cd = cos(D), sd = sin(D), cp = cos(P), sp = sin(P);
        Y3 Y;
        for (int i = 0; i < 3; ++i) Y[i] = cd * Q(i) + sd * (cp * e(i) + sp * e2(i));
        return Y;
    }
    // Weight for an integral over M (half the S^4 integral).
    double weight(double d, double psi, const Y3& Y) const {
        const double sd = std::sin(d), sp = std::sin(psi);
        const double w = 4.0 * pi * sd * sd * sd * sp * sp;
        if (!partition) return 0.5 * w;
        return w * smooth_step(Y[1].v / sin_s).v;
    }
};

double descriptor_center(const TestFunctionDescriptor& d, bool* pole_centered) {
    const bool small = d.variant == TestVariant::Single ||
                       (d.variant == TestVariant::Double && d.t < 2.0 * d.epsilon);
    *pole_centered = small;
    if (small) return 0.0;
    if (has_glued(d)) return d.s;
    return d.pole > 0 ? d.t : pi - d.t;
}

void add_features(const TestFunctionDescriptor& d, double s, bool pole_centered, std::vector<double>& br) {
    auto more = dyadic_breakpoints(0.0, d.epsilon, 0.0, pi);
    br.insert(br.end(), more.begin(), more.end());
    if (pole_centered) {
        if (d.t > 0) br.push_back(d.t);
        if (std::isfinite(d.delta)) br.insert(br.end(), {d.delta, 2.0 * d.delta});
        return;
    }
    const double tn = std::min(s, pi - s);
    for (double k : {0.5, 1.0, 1.5, 2.0}) br.push_back(k * tn);
    if (has_glued(d)) {
        const RhoMap rm(d.T);
        br.insert(br.end(), {0.25 * d.T, 0.5 * d.T, rm.inverse(d.tau), rm.inverse(2.0 * d.tau)});
    }
}

PolarFrame make_frame(const TestFunctionDescriptor& a, const TestFunctionDescriptor* b = nullptr) {
    PolarFrame f;
    bool pole_centered;
    const double s = descriptor_center(a, &pole_centered);
    if (pole_centered) {
        f.Q = Vec3(a.pole, 0.0, 0.0);
        f.e = Vec3(0.0, 1.0, 0.0);
    } else {
        f.Q = Vec3(std::cos(s), std::sin(s), 0.0);
        f.e = Vec3(std::sin(s), -std::cos(s), 0.0);
        f.partition = true;
        f.sin_s = std::sin(s);
    }
    std::vector<double> br;
    add_features(a, s, pole_centered, br);
    if (b) add_features(*b, s, pole_centered, br);
    f.d_breaks = merge_breakpoints(std::move(br), 0.0, pi);
    f.psi_breaks = {0.0, pi / 8, pi / 4, pi / 2, 3 * pi / 4, pi};
    return f;
}

template <class Fn>
IntegralResult integrate_frame(const PolarFrame& f, const Fn& fn, const QuadratureSpec& spec) {
    const Axis ad(f.d_breaks), ap(f.psi_breaks);
    return integrate_2d(
        [&](double d, double psi) {
            const Y3 Y = f.point(d, psi);
            const double w = f.weight(d, psi, Y);
            if (w == 0.0) return 0.0;
            return w * fn(d, Y);
        },
        ad, ap, spec);
}

QuotientResult finish(const IntegralResult& N, const IntegralResult& D) {
    QuotientResult r;
    r.numerator = N.value;
    r.denominator = D.value;
    r.numerator_error = N.error_estimate;
    r.denominator_error = D.error_estimate;
    r.converged = N.converged && D.converged;
    if (!(D.value > 0.0)) throw NumericalFailure("test function has vanishing L4 norm");
    r.Q = N.value / std::sqrt(D.value);
    r.error = std::abs(r.Q) * (N.error_estimate / std::abs(N.value) + 0.5 * D.error_estimate / D.value);
    return r;
}

double six_s4() { return 6.0 * constants().S4; }

}  // namespace

std::string to_string(TestVariant v) {
    switch (v) {
        case TestVariant::Single: return "single";
        case TestVariant::Double: return "double";
        case TestVariant::Glued: return "glued";
        case TestVariant::Interp: return "interp";
    }
    return "?";
}

TestVariant parse_test_variant(const std::string& s) {
    if (s == "single") return TestVariant::Single;
    if (s == "double") return TestVariant::Double;
    if (s == "glued") return TestVariant::Glued;
    if (s == "interp") return TestVariant::Interp;
    throw InvalidParameter("unknown test function variant: " + s);
}

bool exponents_admissible(double alpha, double omega) {
    return 1.0 > omega && omega > alpha && alpha > 0.5 && 2.0 + 2.0 * alpha - 4.0 * omega > 0.0;
}

void TestFunctionDescriptor::validate() const {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    if (pole != 1 && pole != -1) throw InvalidParameter("pole must be +1 or -1");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw InvalidParameter("amplitude must be positive and finite");
    if (has_double(*this) && !(t >= 0.0 && t < delta / 4 + 1e-15))
        throw InvalidParameter("double-bubble separation must lie in [0, delta/4]");
    if (has_glued(*this)) {
        if (!(s > 0.0 && s < pi)) throw InvalidParameter("glued point must lie strictly between the tips");
        if (!(tau > epsilon)) throw InvalidParameter("gluing radius must exceed epsilon");
        if (!(nu_match > 0.0) || !(T > 0.0)) throw InvalidParameter("glued descriptor lacks its matching data");
        const double tn = std::min(s, pi - s);
        if (!(RhoMap(T).inverse(2.0 * tau) < tn))
            throw InvalidParameter("gluing balls about q and its mirror image overlap; decrease epsilon");
    }
    if (variant == TestVariant::Interp) {
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidParameter("lambda must lie in [0, 1]");
        if (!exponents_admissible(alpha, omega)) throw InvalidParameter("exponents violate 1>omega>alpha>1/2, 2+2alpha-4omega>0");
    }
}

TestFunctionDescriptor single_bubble(double epsilon, double delta, int pole) {
    TestFunctionDescriptor d;
    d.variant = TestVariant::Single;
    d.epsilon = epsilon;
    d.delta = delta;
    d.pole = pole;
    d.validate();
    return d;
}

TestFunctionDescriptor double_bubble(double epsilon, double t, double delta, int pole) {
    TestFunctionDescriptor d = single_bubble(epsilon, delta, pole);
    d.variant = TestVariant::Double;
    d.t = t;
    d.validate();
    return d;
}

namespace {

void attach_glued(TestFunctionDescriptor& d, double s, double tau) {
    d.s = s;
    d.tau = tau;
    const double tn = std::min(s, pi - s);
    d.T = std::min(tn, d.delta);
    d.A_q = FootballModel::mass(s);
    require(tau > d.epsilon, "gluing radius must exceed epsilon");
    d.nu_match = continuity_nu(d.epsilon, tau, d.A_q);
}

}  // namespace

TestFunctionDescriptor glued_bubble(double epsilon, double s, double tau, double delta) {
    TestFunctionDescriptor d;
    d.variant = TestVariant::Glued;
    d.epsilon = epsilon;
    d.delta = delta;
    attach_glued(d, s, tau);
    d.validate();
    return d;
}

TestFunctionDescriptor interpolated(double epsilon, double lambda, double alpha, double omega, double delta, int pole) {
    if (!exponents_admissible(alpha, omega))
        throw InvalidParameter("exponents violate 1>omega>alpha>1/2, 2+2alpha-4omega>0");
    TestFunctionDescriptor d;
    d.variant = TestVariant::Interp;
    d.epsilon = epsilon;
    d.delta = delta;
    d.pole = pole;
    d.alpha = alpha;
    d.omega = omega;
    d.lambda = lambda;
    d.t = std::pow(epsilon, alpha);
    attach_glued(d, pole > 0 ? d.t : pi - d.t, std::pow(epsilon, omega));
    d.validate();
    return d;
}

double lifted_value(const TestFunctionDescriptor& d, const Vec5& Y) {
    const Lifted f(d);
    const Y3 y{Dual2(Y(0)), Dual2(Y(1)), Dual2(Y.tail<3>().norm())};
    return f(y).v;
}

QuadratureSpec path_default_spec() {
    QuadratureSpec s;
    s.rel_tol = 1e-11;
    s.abs_tol = 1e-13;
    s.max_subdivisions = 40000;
    return s;
}

QuotientResult evaluate_quotient(const TestFunctionDescriptor& d, const QuadratureSpec& spec) {
    d.validate();
    if (!(d.delta < pi / 4)) throw InvalidParameter("football charts need delta < pi/4");
    const Lifted f(d);
    const PolarFrame frame = make_frame(d);
    const IntegralResult N = integrate_frame(
        frame,
        [&](double dist, const Y3& Y) {
            const Dual2 v = f(Y);
            const double sd = std::sin(dist);
            return conformal_a * (v.d0 * v.d0 + v.d1 * v.d1 / (sd * sd)) + 12.0 * v.v * v.v;
        },
        spec);
    const IntegralResult D = integrate_frame(
        frame,
        [&](double, const Y3& Y) {
            const double v = f(Y).v;
            return v * v * v * v;
        },
        spec);
    return finish(N, D);
}

QuotientResult evaluate_quotient_chart(const TestFunctionDescriptor& d, FieldPtr field, const QuadratureSpec& spec) {
    d.validate();
    if (has_glued(d)) throw InvalidParameter("chart route only handles tip-chart test functions");
    if (!field || !field->warp()) throw InvalidParameter("chart route needs a radial tip chart");
    const Warp& w = *field->warp();
    const double R = std::isinf(d.delta) ? inf : 2.0 * d.delta;
    if (std::isinf(R) && w.curvature_sign != 0) throw InvalidParameter("unbounded support needs a flat chart");
    const double eps = d.epsilon, t = d.variant == TestVariant::Single ? 0.0 : d.t;
    const double k = (d.variant == TestVariant::Double && t == 0.0) ? 2.0 : 1.0;
    // u and |grad u|_g^2, sqrt det g, R at (zeta, rho).
    auto local = [&](double z, double r, double& grad2, double& vol, double& scal) {
        const Dual2 Z(z, 1.0, 0.0), P(r, 0.0, 1.0);
        const Dual2 s2 = Z * Z + P * P;
        const double s = std::sqrt(s2.v);
        const Dual2 cut = chi(sqrt(s2), d.delta);
        Dual2 u;
        if (t == 0.0)
            u = k * bubble_sq(s2, eps) * cut;
        else
            u = (bubble_sq((Z - t) * (Z - t) + P * P, eps) + bubble_sq((Z + t) * (Z + t) + P * P, eps)) * cut;
        u = d.amplitude * u;
        const double ws = s > 0 ? w.w(s) / s : 1.0;
        const double A = ws * ws, B = s > 0 ? (1.0 - A) / (s * s) : 0.0;
        const double radial = z * u.d0 + r * u.d1;
        grad2 = (u.d0 * u.d0 + u.d1 * u.d1 - B * radial * radial / (A + B * s * s)) / A;
        vol = A * std::sqrt(A * (A + B * s * s));
        scal = w.scalar_curvature(s);
        return u.v;
    };
    BiradialDomain dom;
    dom.zeta_min = 0.0;
    dom.zeta_max = R;
    dom.rho_max = R;
    dom.zeta_centers = {t};
    dom.core_scale = eps;
    const IntegralResult N = integrate_biradial(
        [&](double z, double r) {
            if (z * z + r * r >= R * R) return 0.0;
            double g2, vol, sc;
            const double u = local(z, r, g2, vol, sc);
            return (conformal_a * g2 + sc * u * u) * vol;
        },
        dom, spec);
    const IntegralResult D = integrate_biradial(
        [&](double z, double r) {
            if (z * z + r * r >= R * R) return 0.0;
            double g2, vol, sc;
            const double u = local(z, r, g2, vol, sc);
            return u * u * u * u * vol;
        },
        dom, spec);
    return finish(N, D);
}

NuMatch nu_matching(double epsilon, double tau, double A_q) {
    if (!(epsilon > 0.0 && tau > epsilon)) throw InvalidParameter("matching needs 0 < eps < tau");
    NuMatch m;
    m.nu = continuity_nu(epsilon, tau, A_q);
    m.inverse = 1.0 / m.nu;
    m.expansion = constants().c4 * epsilon * (1.0 - tau * tau * A_q - epsilon * epsilon / (tau * tau));
    m.gap = std::abs(m.expansion - m.inverse) / m.inverse;
    return m;
}

BoundaryFlux boundary_flux(double epsilon, double tau, const QuadratureSpec& spec) {
    if (!(epsilon > 0.0 && tau > 0.0)) throw InvalidParameter("flux needs eps, tau > 0");
    const double c4 = constants().c4, q = tau * tau / (epsilon * epsilon);
    BoundaryFlux f;
    f.closed_form = 2.0 * pi * pi * tau * tau * tau *
                    (-2.0 * c4 * c4 * std::pow(epsilon, -4.0) * tau / std::pow(1.0 + q, 3.0));
    const IntegralResult r = integrate_sphere3(
        [&](const Vec4& z) {
            const double s = z.norm() / epsilon;
            return bubble_profile_dr(s) / (epsilon * epsilon) * bubble_profile(s) / epsilon;
        },
        tau, Vec4::Zero(), spec);
    f.quadrature = r.value;
    f.quadrature_error = r.error_estimate;
    return f;
}

double l4_distance(const TestFunctionDescriptor& a, const TestFunctionDescriptor& b, const QuadratureSpec& spec) {
    a.validate();
    b.validate();
    const Lifted fa(a), fb(b);
    const PolarFrame frame = make_frame(a, &b);
    const IntegralResult diff = integrate_frame(
        frame,
        [&](double, const Y3& Y) {
            const double v = fa(Y).v - fb(Y).v;
            return v * v * v * v;
        },
        spec);
    const IntegralResult norm = integrate_frame(
        frame,
        [&](double, const Y3& Y) {
            const double v = fa(Y).v;
            return v * v * v * v;
        },
        spec);
    return std::pow(std::max(diff.value, 0.0) / norm.value, 0.25);
}

namespace {

TestFunctionDescriptor leg_descriptor(int leg, double mu, const PathOptions& o) {
    const double ea = std::pow(o.epsilon, o.alpha);
    switch (leg) {
        case 0: return double_bubble(o.epsilon, mu * ea, o.delta, 1);
        case 1: return interpolated(o.epsilon, mu - 1.0, o.alpha, o.omega, o.delta, 1);
        case 2: {
            const double t = ea + (mu - 2.0) * (pi - 2.0 * ea);
            const double k = o.omega / o.alpha;
            const double tau = std::min({std::pow(t, k), std::pow(pi - t, k), std::pow(0.5 * o.delta, k)});
            return glued_bubble(o.epsilon, t, tau, o.delta);
        }
        case 3: return interpolated(o.epsilon, 4.0 - mu, o.alpha, o.omega, o.delta, -1);
        default: return double_bubble(o.epsilon, (5.0 - mu) * ea, o.delta, -1);
    }
}

}  // namespace

TestFunctionDescriptor path_descriptor(double mu, const PathOptions& opt) {
    if (!(mu >= 0.0 && mu <= 5.0)) throw InvalidParameter("path parameter must lie in [0, 5]");
    return leg_descriptor(std::min(4, static_cast<int>(std::floor(mu))), mu, opt);
}

PathProfile build_path(const PathOptions& opt) {
    if (!exponents_admissible(opt.alpha, opt.omega))
        throw InvalidParameter("exponents violate 1>omega>alpha>1/2, 2+2alpha-4omega>0");
    if (opt.points < 6) throw InvalidParameter("path grid needs at least 6 points");
    if (!(std::pow(opt.epsilon, opt.alpha) < opt.delta / 4)) throw InvalidParameter("need eps^alpha < delta/4");
    const auto start = std::chrono::steady_clock::now();
    PathProfile p;
    p.options = opt;
    const int n = opt.points;
    for (int i = 0; i < n; ++i) {
        p.mu.push_back(5.0 * i / (n - 1));
        p.descriptors.push_back(path_descriptor(p.mu.back(), opt));
    }
    p.values.resize(n);
    parallel_for(n, opt.threads, [&](int i) {
        try {
            p.values[i] = evaluate_quotient(p.descriptors[i], opt.spec);
        } catch (const std::exception& e) {
            throw NumericalFailure("path evaluation failed at mu = " + std::to_string(p.mu[i]) + ": " + e.what());
        }
        if (!p.values[i].converged)
            throw NumericalFailure("quadrature did not converge at mu = " + std::to_string(p.mu[i]));
    });
    for (int i = 0; i < n; ++i) {
        if (p.argmax < 0 || p.values[i].Q > p.max_Q) {
            p.max_Q = p.values[i].Q;
            p.argmax = i;
        }
        p.max_error = std::max(p.max_error, p.values[i].error);
    }
    p.transition_gaps.resize(4);
    parallel_for(4, opt.threads, [&](int k) {
        const double mu = k + 1.0;
        p.transition_gaps[k] = l4_distance(leg_descriptor(k, mu, opt), leg_descriptor(k + 1, mu, opt), opt.spec);
    });
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return p;
}

std::string to_string(FitLeg l) {
    switch (l) {
        case FitLeg::Double: return "double";
        case FitLeg::Glued: return "glued";
        case FitLeg::Interp: return "interp";
    }
    return "?";
}

FitLeg parse_fit_leg(const std::string& s) {
    if (s == "double") return FitLeg::Double;
    if (s == "glued") return FitLeg::Glued;
    if (s == "interp") return FitLeg::Interp;
    throw InvalidParameter("unknown fit leg: " + s);
}

ExpansionFit fit_expansion_A(FitLeg leg, const std::vector<double>& epsilons, double alpha, double omega, double delta,
                             double lambda, const QuadratureSpec& spec, int threads) {
    if (epsilons.size() < 2) throw InvalidParameter("fit needs at least two values of epsilon");
    if (!exponents_admissible(alpha, omega))
        throw InvalidParameter("exponents violate 1>omega>alpha>1/2, 2+2alpha-4omega>0");
    ExpansionFit fit;
    fit.leg = leg;
    fit.lambda = lambda;
    fit.alpha = alpha;
    fit.epsilon = epsilons;
    const int n = static_cast<int>(epsilons.size());
    fit.Q.resize(n);
    fit.Q_error.resize(n);
    parallel_for(n, threads, [&](int i) {
        const double e = epsilons[i], t = std::pow(e, alpha);
        TestFunctionDescriptor d;
        switch (leg) {
            case FitLeg::Double: d = double_bubble(e, t, delta, 1); break;
            case FitLeg::Glued: d = glued_bubble(e, t, std::pow(e, omega), delta); break;
            case FitLeg::Interp: d = interpolated(e, lambda, alpha, omega, delta, 1); break;
        }
        const QuotientResult q = evaluate_quotient(d, spec);
        fit.Q[i] = q.Q;
        fit.Q_error[i] = q.error;
    });
    const double p = 2.0 * (1.0 - alpha);
    double sxx = 0, sxy = 0, var = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::pow(epsilons[i], p), y = six_s4() - fit.Q[i];
        sxx += x * x;
        sxy += x * y;
        var += x * x * fit.Q_error[i] * fit.Q_error[i];
    }
    fit.A_hat = sxy / sxx;
    fit.A_error = std::sqrt(var) / sxx;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = six_s4() - fit.Q[i] - fit.A_hat * std::pow(epsilons[i], p);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    double lx = 0, ly = 0, lxx = 0, lxy = 0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
        const double y = six_s4() - fit.Q[i];
        if (!(y > 0)) {
            ok = false;
            break;
        }
        const double a = std::log(epsilons[i]), b = std::log(y);
        lx += a;
        ly += b;
        lxx += a * a;
        lxy += a * b;
    }
    if (ok) {
        fit.exponent = (n * lxy - lx * ly) / (n * lxx - lx * lx);
        fit.C_free = std::exp((ly - fit.exponent * lx) / n);
    } else {
        fit.exponent = std::nan("");
        fit.C_free = std::nan("");
    }
    return fit;
}

Calibration calibrate_epsilon(double eps_start, double ratio, int max_steps, double rel_tol, double alpha,
                              double omega, double delta, const QuadratureSpec& spec, int threads) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidParameter("calibration ratio must lie in (0, 1)");
    Calibration c;
    std::vector<double> eps(max_steps);
    for (int i = 0; i < max_steps; ++i) eps[i] = eps_start * std::pow(ratio, i);
    std::vector<double> A(max_steps, std::nan(""));
    // Steps whose gluing balls overlap are skipped (A stays NaN).
    parallel_for(max_steps, threads, [&](int i) {
        try {
            const QuotientResult q = evaluate_quotient(interpolated(eps[i], 0.5, alpha, omega, delta, 1), spec);
            A[i] = (six_s4() - q.Q) / std::pow(eps[i], 2.0 * (1.0 - alpha));
        } catch (const InvalidParameter&) {
        }
    });
    for (int i = 0; i < max_steps; ++i) {
        c.epsilons.push_back(eps[i]);
        c.A_local.push_back(A[i]);
        c.epsilon = eps[i];
        if (i > 0 && std::isfinite(A[i]) && std::isfinite(A[i - 1]) &&
            std::abs(A[i] - A[i - 1]) < rel_tol * std::abs(A[i])) {
            c.converged = true;
            break;
        }
    }
    return c;
}

}  // namespace cyl
