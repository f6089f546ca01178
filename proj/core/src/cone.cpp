#include "cyl/cone.hpp"

#include <cmath>
#include <random>

#include "cyl/ode.hpp"

namespace cyl {

LinkFunction LinkFunction::constant(double c) {
    return {[c](const Vec4&) { return c; }, [](const Vec4&) { return Vec4::Zero().eval(); },
            [](const Vec4&) { return Mat4::Zero().eval(); }};
}

LinkFunction LinkFunction::coordinate(int i) {
    if (i < 0 || i > 3) throw InvalidParameter("coordinate index out of range");
    return {[i](const Vec4& z) { return z(i); }, [i](const Vec4&) { return Vec4::Unit(i).eval(); },
            [](const Vec4&) { return Mat4::Zero().eval(); }};
}

LinkFunction LinkFunction::quadratic(const Mat4& Q) {
    const Mat4 S = 0.5 * (Q + Q.transpose());
    return {[S](const Vec4& z) { return z.dot(S * z); }, [S](const Vec4& z) { return (2.0 * S * z).eval(); },
            [S](const Vec4&) { return (2.0 * S).eval(); }};
}

Mat4 tangent_projector(const Vec4& z) { return Mat4::Identity() - z * z.transpose(); }

Mat4 link_hessian(const LinkFunction& f, const Vec4& z) {
    const Mat4 P = tangent_projector(z);
    return P * (f.hess(z) - z.dot(f.grad(z)) * Mat4::Identity()) * P;
}

Eigen::Matrix<double, 4, 3> tangent_basis(const Vec4& z) {
    Eigen::Matrix<double, 4, 3> B;
    std::vector<Vec4> basis{z};
    for (int k = 0; k < 4 && basis.size() < 4; ++k) {
        Vec4 v = Vec4::Unit(k);
        for (const auto& b : basis) v -= v.dot(b) * b;
        if (v.norm() < 0.3) continue;
        basis.push_back(v.normalized());
    }
    for (int a = 0; a < 3; ++a) B.col(a) = basis[a + 1];
    return B;
}

LinkFamily LinkFamily::exact(Link link) {
    LinkFamily f;
    f.link = link;
    f.h = [](double, const Vec4&) { return Mat4::Identity().eval(); };
    f.dh = [](double, const Vec4&) { return Mat4::Zero().eval(); };
    f.reg_order = 1000;
    f.name = "exact";
    return f;
}

LinkFamily LinkFamily::isotropic(Link link, std::function<double(double)> phi, std::function<double(double)> dphi,
                                 int reg_order, std::string name) {
    LinkFamily f;
    f.link = link;
    f.h = [phi](double s, const Vec4&) { return (phi(s) * Mat4::Identity()).eval(); };
    f.dh = [dphi](double s, const Vec4&) { return (dphi(s) * Mat4::Identity()).eval(); };
    f.reg_order = reg_order;
    f.name = std::move(name);
    return f;
}

namespace {

double sinc2(double s) {
    if (std::abs(s) < 1e-3) {
        const double q = s * s;
        return 1.0 - q / 3.0 + 2.0 * q * q / 45.0;
    }
    const double v = std::sin(s) / s;
    return v * v;
}

double dsinc2(double s) {
    if (std::abs(s) < 1e-3) return -2.0 * s / 3.0 + 8.0 * s * s * s / 45.0;
    // d/ds sin^2 s / s^2 = (sin 2s) / s^2 - 2 sin^2 s / s^3
    return std::sin(2.0 * s) / (s * s) - 2.0 * std::sin(s) * std::sin(s) / (s * s * s);
}

}  // namespace

LinkFamily LinkFamily::football() { return isotropic(Link::RP3, sinc2, dsinc2, 1, "football"); }

LinkFamily LinkFamily::first_order(Link link, std::function<Mat4(const Vec4&)> H1, std::string name) {
    LinkFamily f;
    f.link = link;
    f.h = [H1](double s, const Vec4& z) { return (Mat4::Identity() + s * H1(z)).eval(); };
    f.dh = [H1](double, const Vec4& z) { return H1(z); };
    f.reg_order = 0;
    f.name = std::move(name);
    return f;
}

LinkFamily LinkFamily::orbifold_gauge(const LinkFunction& fn) {
    return first_order(
        Link::RP3,
        [fn](const Vec4& z) {
            const Mat4 P = tangent_projector(z);
            return (-(link_hessian(fn, z) + fn.value(z) * P)).eval();
        },
        "orbifold-gauge");
}

Mat4 ConeMetric::gram(double s, const Vec4& z) const {
    const auto B = tangent_basis(z);
    Mat4 G = Mat4::Zero();
    G(0, 0) = 1.0;
    G.block<3, 3>(1, 1) = s * s * B.transpose() * family.h(s, z) * B;
    return G;
}

PulledBackCone::PulledBackCone(ConeMetric cone, double ball_radius, double step)
    : cone_(std::move(cone)), radius_(ball_radius), step_(step) {
    if (!(ball_radius > 0.0) || ball_radius > cone_.s_max) throw InvalidParameter("ball radius must lie in (0, s_max]");
}

Mat4 PulledBackCone::metric(const Vec4& x) const {
    const double s = x.norm();
    if (s == 0.0) return Mat4::Identity();
    const Vec4 u = x / s;
    const Mat4 P = tangent_projector(u);
    const Mat4 g = u * u.transpose() + P * cone_.family.h(s, u) * P;
    Eigen::LLT<Mat4> llt(g);
    if (llt.info() != Eigen::Success) throw ChartBreakdown("pulled-back cone metric is not positive definite");
    return g;
}

std::shared_ptr<PulledBackCone> pullback_via_phi(const ConeMetric& cone, double ball_radius) {
    if (cone.family.reg_order < 1) throw InvalidParameter("pull-back needs regularity order k >= 1");
    return std::make_shared<PulledBackCone>(cone, ball_radius, 1e-4 * ball_radius);
}

std::vector<Vec4> sphere_samples(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<Vec4> out;
    while (static_cast<int>(out.size()) < n) {
        Vec4 v(N(rng), N(rng), N(rng), N(rng));
        if (v.norm() < 1e-3) continue;
        out.push_back(v.normalized());
    }
    return out;
}

namespace {

double nested_difference(const std::function<double(const Vec4&)>& b, const Vec4& p, const std::vector<int>& idx,
                         std::size_t pos, double h) {
    if (pos == idx.size()) return b(p);
    const Vec4 e = Vec4::Unit(idx[pos]) * h;
    return (nested_difference(b, p + e, idx, pos + 1, h) - nested_difference(b, p - e, idx, pos + 1, h)) / (2 * h);
}

void multi_indices(int order, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == order) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < 4; ++i) {
        cur.push_back(i);
        multi_indices(order, i, cur, out);
        cur.pop_back();
    }
}

RegularityReport fit_report(int order, const std::vector<double>& radii, const std::vector<double>& sup) {
    RegularityReport rep;
    rep.order = order;
    rep.radii = radii;
    rep.sup = sup;
    const double smax = *std::max_element(sup.begin(), sup.end());
    if (smax < 1e-9) {
        rep.fitted_exponent = 0.0;
        rep.fitted_constant = smax;
        rep.bounded = true;
        return rep;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(radii.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(radii[i]), y = std::log(std::max(sup[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.fitted_constant = std::exp((sy - rep.fitted_exponent * sx) / n);
    rep.bounded = rep.fitted_exponent > -0.3;
    return rep;
}

}  // namespace

RegularityReport regularity_probe(const std::function<double(const Vec4&)>& b, int order,
                                  const std::vector<double>& radii) {
    if (order < 1 || order > 3) throw InvalidParameter("probe order must be 1, 2 or 3");
    if (radii.size() < 2) throw InvalidParameter("need at least two radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1]) || !(radii[i] > 0)) throw InvalidParameter("radii must decrease to 0");
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    multi_indices(order, 0, cur, idx);
    const auto dirs = sphere_samples(16, 11);
    std::vector<double> sup;
    for (double r : radii) {
        const double h = r / 8.0;
        double m = 0.0;
        for (const auto& w : dirs)
            for (const auto& ix : idx) m = std::max(m, std::abs(nested_difference(b, r * w, ix, 0, h)));
        sup.push_back(m);
    }
    return fit_report(order, radii, sup);
}

RegularityReport regularity_probe(const MetricField& field, int order, const std::vector<double>& radii) {
    RegularityReport best;
    bool first = true;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            auto comp = [&field, i, j](const Vec4& x) { return field.metric(x)(i, j) - (i == j ? 1.0 : 0.0); };
            RegularityReport r = regularity_probe(comp, order, radii);
            if (first) {
                best = r;
                first = false;
                continue;
            }
            for (std::size_t k = 0; k < r.sup.size(); ++k) best.sup[k] = std::max(best.sup[k], r.sup[k]);
        }
    return fit_report(order, radii, best.sup);
}

void link_flow_with_differential(const LinkFunction& f, double s, const Vec4& z, Vec4& out, Mat4& D) {
    if (std::abs(z.norm() - 1.0) > 1e-10) throw InvalidParameter("link point must lie on the unit sphere");
    Eigen::VectorXd y(20);
    y.head<4>() = z;
    for (int a = 0; a < 4; ++a) y.segment<4>(4 + 4 * a) = Vec4::Unit(a);
    auto rhs = [&f](double, const Eigen::VectorXd& st) {
        Eigen::VectorXd d(20);
        const Vec4 p = st.head<4>();
        const Vec4 g = f.grad(p);
        const Mat4 H = f.hess(p);
        const double zg = p.dot(g);
        d.head<4>() = 0.5 * (g - zg * p);
        const Mat4 DF = 0.5 * (H - p * (g + H * p).transpose() - zg * Mat4::Identity());
        for (int a = 0; a < 4; ++a) d.segment<4>(4 + 4 * a) = DF * st.segment<4>(4 + 4 * a);
        return d;
    };
    OdeOptions opt;
    opt.rel_tol = 1e-13;
    opt.abs_tol = 1e-15;
    const Eigen::VectorXd r = integrate_dp45(rhs, y, 0.0, s, opt);
    out = r.head<4>();
    for (int a = 0; a < 4; ++a) D.col(a) = r.segment<4>(4 + 4 * a);
}

Vec4 link_flow(const LinkFunction& f, double s, const Vec4& z) {
    Vec4 out;
    Mat4 D;
    link_flow_with_differential(f, s, z, out, D);
    return out;
}

namespace {

void check_alpha(const LinkFunction& f, const LinkFamily& fam, double s, const Vec4& z) {
    if (std::abs(s * f.value(z)) >= 0.5) throw InvalidParameter("need |s f| < 1/2 for the alpha map");
    if (fam.link == Link::RP3 && std::abs(f.value(z) - f.value(-z)) > 1e-12)
        throw InvalidParameter("functions on RP^3 must be antipodally even");
}

}  // namespace

Mat4 alpha_pullback(const LinkFunction& f, const LinkFamily& fam, double s, const Vec4& z) {
    check_alpha(f, fam, s, z);
    const auto B = tangent_basis(z);
    Vec4 zeta;
    Mat4 D;
    link_flow_with_differential(f, s, z, zeta, D);
    const double fz = f.value(z);
    const double r = s - 0.5 * s * s * fz;
    const Vec4 gz = f.grad(z);
    std::array<double, 4> dr;
    std::array<Vec4, 4> V;
    dr[0] = 1.0 - s * fz;
    V[0] = 0.5 * tangent_projector(zeta) * f.grad(zeta);
    for (int a = 0; a < 3; ++a) {
        dr[a + 1] = -0.5 * s * s * gz.dot(B.col(a));
        V[a + 1] = D * B.col(a);
    }
    const Mat4 h = fam.h(r, zeta);
    Mat4 G;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) G(a, b) = dr[a] * dr[b] + r * r * V[a].dot(h * V[b]);
    return (1.0 + 2.0 * s * fz) * G;
}

Eigen::Matrix3d iota_H(const LinkFunction& f, const LinkFamily& fam, double s, const Vec4& z) {
    check_alpha(f, fam, s, z);
    const auto B = tangent_basis(z);
    Vec4 zeta;
    Mat4 D;
    link_flow_with_differential(f, s, z, zeta, D);
    const double fz = f.value(z);
    const Eigen::Vector3d df = B.transpose() * f.grad(z);
    const Eigen::Matrix<double, 4, 3> V = D * B;
    const double a1 = s - 0.5 * s * s * fz;
    const double k = 1.0 - 0.5 * s * fz;
    const Eigen::Matrix3d H = 0.25 * s * s * df * df.transpose() + k * k * V.transpose() * fam.h(a1, zeta) * V;
    return (1.0 + 2.0 * s * fz) * H;
}

FirstOrderReport verify_first_order_identity(const LinkFunction& f, const LinkFamily& fam, double h_fd,
                                             int n_samples) {
    if (!(h_fd > 0.0)) throw InvalidParameter("h_fd must be positive");
    FirstOrderReport rep{0.0, 0.0, sphere_samples(n_samples, 5)};
    for (const Vec4& z : rep.samples) {
        const auto B = tangent_basis(z);
        const Eigen::Matrix3d d =
            (-3.0 * iota_H(f, fam, 0.0, z) + 4.0 * iota_H(f, fam, h_fd, z) - iota_H(f, fam, 2 * h_fd, z)) / (2 * h_fd);
        const Eigen::Matrix3d target =
            B.transpose() * (fam.dh(0.0, z) + link_hessian(f, z) + f.value(z) * Mat4::Identity()) * B;
        rep.residual = std::max(rep.residual, (d - target).cwiseAbs().maxCoeff());
        rep.derivative_norm = std::max(rep.derivative_norm, d.cwiseAbs().maxCoeff());
    }
    return rep;
}

}  // namespace cyl
