#include "cyl/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "cyl/cone.hpp"
#include "cyl/constants.hpp"
#include "cyl/curvature.hpp"
#include "cyl/normal_coords.hpp"
#include "cyl/parallel.hpp"

namespace cyl {

namespace {

struct Chebyshev {
    std::vector<double> r;
    Eigen::MatrixXd D, D2;
};

// Gauss-Lobatto nodes on [0, delta] with r_0 = 0 and r_N = delta.
Chebyshev chebyshev(int N, double delta) {
    Chebyshev c;
    std::vector<double> x(N + 1);
    c.r.resize(N + 1);
    for (int j = 0; j <= N; ++j) {
        x[j] = std::cos(pi * j / N);
        c.r[j] = 0.5 * delta * (1.0 - x[j]);
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        const double ci = (i == 0 || i == N) ? 2.0 : 1.0;
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const double cj = (j == 0 || j == N) ? 2.0 : 1.0;
            D(i, j) = (ci / cj) * (((i + j) % 2) ? -1.0 : 1.0) / (x[i] - x[j]);
        }
        D(i, i) = -D.row(i).sum();
    }
    c.D = (-2.0 / delta) * D;
    c.D2 = c.D * c.D;
    return c;
}

void chebyshev_u(double c, int L, std::vector<double>& U) {
    U.resize(L + 1);
    U[0] = 1.0;
    if (L >= 1) U[1] = 2.0 * c;
    for (int l = 2; l <= L; ++l) U[l] = 2.0 * c * U[l - 1] - U[l - 2];
}

struct AngularRule {
    std::vector<double> x, w;  // int_{-1}^{1} f sqrt(1 - x^2) dx ~ sum w f(x)
};

AngularRule angular_rule(int M) {
    AngularRule a;
    for (int k = 1; k <= M; ++k) {
        const double th = pi * k / (M + 1);
        a.x.push_back(std::cos(th));
        a.w.push_back(pi / (M + 1) * std::sin(th) * std::sin(th));
    }
    return a;
}

Vec4 perpendicular(const Vec4& axis) {
    int k = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(axis(i)) < std::abs(axis(k))) k = i;
    Vec4 p = Vec4::Unit(k) - axis(k) * axis;
    return p.normalized();
}

// Zonal coefficients of f on the sphere of radius r, and the reconstruction defect.
std::vector<double> zonal_coefficients(const std::function<double(const Vec4&)>& f, double r, const Vec4& axis,
                                       const Vec4& perp, int L, const AngularRule& rule, double* defect,
                                       double* scale) {
    const int M = static_cast<int>(rule.x.size());
    std::vector<double> vals(M), coef(L + 1, 0.0), U;
    for (int k = 0; k < M; ++k) {
        const double c = rule.x[k], s = std::sqrt(std::max(0.0, 1.0 - c * c));
        vals[k] = f(r * (c * axis + s * perp));
        chebyshev_u(c, L, U);
        for (int l = 0; l <= L; ++l) coef[l] += (2.0 / pi) * rule.w[k] * vals[k] * U[l];
    }
    if (defect) {
        for (int k = 0; k < M; ++k) {
            chebyshev_u(rule.x[k], L, U);
            double s = 0.0;
            for (int l = 0; l <= L; ++l) s += coef[l] * U[l];
            *defect = std::max(*defect, std::abs(s - vals[k]));
            *scale = std::max(*scale, std::abs(vals[k]));
        }
    }
    return coef;
}

struct ModeData {
    std::vector<std::vector<double>> values;
    double source_defect = 0.0, boundary_defect = 0.0;
};

ModeData solve_modes(const GreenProblem& p, const Vec4& axis, const std::function<double(const Vec4&)>& source,
                     const std::function<double(const Vec4&)>& boundary) {
    const int L = p.resolution.harmonic_cutoff, N = p.resolution.radial_nodes;
    const int M = p.resolution.angular_nodes > 0 ? p.resolution.angular_nodes : 2 * L + 16;
    const Warp& w = *p.field->warp();
    const double R = w.scalar_curvature(0.0);
    const Chebyshev ch = chebyshev(N, p.delta);
    const AngularRule rule = angular_rule(M);
    const Vec4 perp = perpendicular(axis);

    std::vector<std::vector<double>> F(N + 1);
    double sdef = 0.0, sscale = 0.0, bdef = 0.0, bscale = 0.0;
    if (source)
        for (int i = 1; i < N; ++i) F[i] = zonal_coefficients(source, ch.r[i], axis, perp, L, rule, &sdef, &sscale);
    const std::vector<double> b = zonal_coefficients(boundary, p.delta, axis, perp, L, rule, &bdef, &bscale);

    ModeData out;
    out.values.assign(L + 1, std::vector<double>(N + 1, 0.0));
    for (int l = 0; l <= L; ++l) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
        if (l == 0)
            A.row(0) = ch.D.row(0);
        else
            A(0, 0) = 1.0;
        for (int i = 1; i < N; ++i) {
            const double r = ch.r[i], wr = w.w(r);
            A.row(i) = -6.0 * ch.D2.row(i) - 18.0 * (w.w1(r) / wr) * ch.D.row(i);
            A(i, i) += 6.0 * l * (l + 2) / (wr * wr) + R;
            if (source) rhs(i) = F[i][l];
        }
        A(N, N) = 1.0;
        rhs(N) = b[l];
        const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
        for (int i = 0; i <= N; ++i) out.values[l][i] = sol(i);
    }
    out.source_defect = sscale > 0 ? sdef / sscale : 0.0;
    out.boundary_defect = bscale > 0 ? bdef / bscale : 0.0;
    return out;
}

Vec4 pole_axis(const Vec4& x) { return x.norm() > 0 ? Vec4(x.normalized()) : Vec4(Vec4::Unit(0)); }

}  // namespace

void GreenProblem::validate() const {
    if (!field) throw InvalidParameter("Green problem needs a metric field");
    if (!(delta > 0.0) || delta >= field->radius()) throw InvalidParameter("ball radius must lie inside the chart");
    if (!(pole.norm() < delta / 4)) throw InvalidParameter("pole must satisfy |x| < delta/4");
    if (resolution.harmonic_cutoff < 0 || resolution.radial_nodes < 4)
        throw InvalidParameter("Green resolution too small");
    space_form_curvature(*field);
}

BoundaryDatum BoundaryDatum::parse(const std::string& s) {
    if (s == "zero" || s == "0") return {DatumKind::Zero, {}};
    if (s == "global") return {DatumKind::Global, {}};
    throw InvalidParameter("boundary datum must be 'zero' or 'global': " + s);
}

std::string to_string(DatumKind k) {
    switch (k) {
        case DatumKind::Zero: return "zero";
        case DatumKind::Global: return "global";
        case DatumKind::Custom: return "custom";
    }
    return "?";
}

ZonalExpansion::ZonalExpansion(Vec4 axis, double delta, std::vector<std::vector<double>> values)
    : axis_(axis.normalized()), delta_(delta), vals_(std::move(values)) {
    if (vals_.empty()) throw InvalidParameter("empty zonal expansion");
    const int N = static_cast<int>(vals_[0].size()) - 1;
    nodes_.resize(N + 1);
    bary_.resize(N + 1);
    for (int j = 0; j <= N; ++j) {
        nodes_[j] = 0.5 * delta * (1.0 - std::cos(pi * j / N));
        bary_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
    }
}

namespace {

// Barycentric weights w_j / (r - r_j) normalized, or an exact node hit.
void bary_factors(const std::vector<double>& nodes, const std::vector<double>& bary, double r, std::vector<double>& out) {
    const int n = static_cast<int>(nodes.size());
    out.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        if (r == nodes[j]) {
            out[j] = 1.0;
            return;
        }
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        out[j] = bary[j] / (r - nodes[j]);
        s += out[j];
    }
    for (auto& v : out) v /= s;
}

}  // namespace

double ZonalExpansion::mode(int l, double r) const {
    std::vector<double> f;
    bary_factors(nodes_, bary_, r, f);
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * vals_[l][j];
    return s;
}

double ZonalExpansion::operator()(const Vec4& y) const {
    const double r = y.norm();
    if (r > delta_ * (1.0 + 1e-12)) throw InvalidParameter("evaluation point outside the ball");
    const double c = r > 0 ? std::clamp(y.dot(axis_) / r, -1.0, 1.0) : 1.0;
    thread_local std::vector<double> f, U;
    bary_factors(nodes_, bary_, std::min(r, delta_), f);
    chebyshev_u(c, cutoff(), U);
    double s = 0.0;
    for (int l = 0; l <= cutoff(); ++l) {
        double m = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) m += f[j] * vals_[l][j];
        s += m * U[l];
    }
    return s;
}

int space_form_curvature(const MetricField& field) {
    const Warp* w = field.warp();
    if (!w || (w->curvature_sign != 0 && w->curvature_sign != 1))
        throw InvalidParameter("Green solver needs a flat or round tip-normal chart");
    return w->curvature_sign;
}

double space_form_distance(int K, const Vec4& a, const Vec4& b) {
    if (K == 0) return (a - b).norm();
    const double chord = (SphereNormalChart::embed(a) - SphereNormalChart::embed(b)).norm();
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

double parametrix_source(int K, double d) {
    if (K == 0) return 0.0;
    if (d < 0.5) {
        // 36 (1/d - d/3 - cot d) / d^3 from the Laurent series of cot.
        static const double c[] = {1.0 / 45, 2.0 / 945, 1.0 / 4725, 2.0 / 93555, 1382.0 / 638512875,
                                   4.0 / 18243225, 3617.0 / 162820783125};
        const double q = d * d;
        double s = 0.0;
        for (int k = 6; k >= 0; --k) s = s * q + c[k];
        return 36.0 * s;
    }
    const double d2 = d * d;
    return 36.0 / (d2 * d2) - 36.0 * std::cos(d) / (std::sin(d) * d2 * d) - 12.0 / d2;
}

GreenFunction::GreenFunction(GreenProblem p, ZonalExpansion regular, int curvature, double mode_residual,
                             double boundary_residual)
    : problem_(std::move(p)),
      regular_(std::move(regular)),
      K_(curvature),
      mode_residual_(mode_residual),
      boundary_residual_(boundary_residual) {}

double GreenFunction::parametrix(const Vec4& y) const {
    const double d = space_form_distance(K_, problem_.pole, y);
    return 1.0 / (d * d);
}

GreenFunction solve_dirichlet_green(const GreenProblem& problem) {
    problem.validate();
    const int K = space_form_curvature(*problem.field);
    const Vec4 x = problem.pole, axis = pole_axis(x);
    auto zeta = [K, x](const Vec4& y) {
        const double d = space_form_distance(K, x, y);
        return 1.0 / (d * d);
    };
    std::function<double(const Vec4&)> source;
    if (K != 0) source = [K, x](const Vec4& y) { return parametrix_source(K, space_form_distance(K, x, y)); };
    ModeData m = solve_modes(problem, axis, source, [&](const Vec4& y) { return -zeta(y); });
    return GreenFunction(problem, ZonalExpansion(axis, problem.delta, std::move(m.values)), K, m.source_defect,
                         m.boundary_defect);
}

ZonalExpansion solve_harmonic_extension(const GreenProblem& problem, const std::function<double(const Vec4&)>& h) {
    problem.validate();
    const Vec4 axis = pole_axis(problem.pole);
    ModeData m = solve_modes(problem, axis, {}, h);
    return ZonalExpansion(axis, problem.delta, std::move(m.values));
}

std::function<double(const Vec4&)> boundary_function(const GreenProblem& problem, const BoundaryDatum& datum) {
    const Vec4 x = problem.pole;
    switch (datum.kind) {
        case DatumKind::Zero: return [](const Vec4&) { return 0.0; };
        case DatumKind::Custom:
            if (!datum.custom) throw InvalidParameter("custom boundary datum without a function");
            return datum.custom;
        case DatumKind::Global: {
            const int K = space_form_curvature(*problem.field);
            return [K, x](const Vec4& y) {
                if (K == 0) return 1.0 / (y - x).squaredNorm() + 1.0 / (y + x).squaredNorm();
                const auto Y = SphereNormalChart::embed(y);
                return 1.0 / (Y - SphereNormalChart::embed(x)).squaredNorm() +
                       1.0 / (Y - SphereNormalChart::embed(-x)).squaredNorm();
            };
        }
    }
    throw InvalidParameter("unknown boundary datum");
}

double QuotientGreen::operator()(const Vec4& y) const {
    double v = (*plus)(y) + (*minus)(y);
    if (has_harmonic) v += harmonic(y);
    return v;
}

double QuotientGreen::symmetry_defect(const std::vector<Vec4>& samples) const {
    double d = 0.0, s = 0.0;
    for (const auto& y : samples) {
        const double a = (*this)(y), b = (*this)(-y);
        d = std::max(d, std::abs(a - b));
        s = std::max(s, std::abs(a));
    }
    return s > 0 ? d / s : d;
}

QuotientGreen assemble_equivariant(std::shared_ptr<const GreenFunction> gx, std::shared_ptr<const GreenFunction> gmx,
                                   const BoundaryDatum& datum) {
    if (!gx || !gmx) throw InvalidParameter("assembly needs both lifted Green functions");
    const GreenProblem& p = gx->problem();
    if (p.field != gmx->problem().field || p.delta != gmx->problem().delta)
        throw InvalidParameter("lifted Green functions must share the ball");
    if ((p.pole + gmx->pole()).norm() > 1e-12 * (1.0 + p.pole.norm()))
        throw InvalidParameter("lifted poles must be antipodal");
    if (!(p.pole.norm() > 0.0)) throw InvalidParameter("pole must differ from the cone tip");
    QuotientGreen q;
    q.plus = std::move(gx);
    q.minus = std::move(gmx);
    if (datum.kind != DatumKind::Zero) {
        q.harmonic = solve_harmonic_extension(p, boundary_function(p, datum));
        q.has_harmonic = true;
    }
    return q;
}

namespace {

// Normal (or conformal normal) coordinates z about a pole, with the conformal
// weight that turns G into the Green function of the rescaled metric.
class PoleFrame {
public:
    PoleFrame(FieldPtr field, const Vec4& pole, bool conformal, double h_fd, double radius) {
        chart_ = best_normal_chart(field, pole, radius, Vec4::Unit(0));
        if (!conformal) return;
        const FieldPtr gn = chart_->field();
        const CurvatureSnapshot s = curvature_at(*gn, Vec4::Zero(), h_fd);
        const CNCFactor f = cnc_polynomial(to_normal_frame(*gn, s, Mat4::Identity()), inf);
        const bool trivial =
            f.quad.cwiseAbs().maxCoeff() < 1e-12 &&
            std::all_of(f.cubic.begin(), f.cubic.end(), [](double c) { return std::abs(c) < 1e-12; });
        if (trivial) return;
        factor_ = f;
        auto gbar = std::make_shared<ConformalField>(gn, [f](const Vec4& z) { return f.fbar(z); });
        cnc_ = normal_coordinates(gbar, Vec4::Zero(), radius, Vec4::Unit(0)).chart;
    }

    // Weighted G at the point with (conformal) normal coordinates z.
    double weighted(const std::function<double(const Vec4&)>& G, const Vec4& z) const {
        if (!cnc_) return G(chart_->to_chart(z));
        const Vec4 zg = cnc_->to_chart(z);
        return std::exp(-0.5 * factor_->fbar(zg).v) * G(chart_->to_chart(zg));
    }

    Vec4 to_chart(const Vec4& z) const { return chart_->to_chart(cnc_ ? cnc_->to_chart(z) : z); }

private:
    std::shared_ptr<const NormalChart> chart_, cnc_;
    std::optional<CNCFactor> factor_;
};

double extrapolate_quadratic(const double* e, const double* m) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= e[j] / (e[j] - e[i]);
        s += w * m[i];
    }
    return s;
}

double default_eps0(const Vec4& pole, double delta) {
    const double t = pole.norm();
    return (t > 0 ? std::min(t, delta) : delta) / 8.0;
}

}  // namespace

MassEstimate extract_mass(const std::function<double(const Vec4&)>& G, FieldPtr field, const Vec4& pole,
                          const MassOptions& opt) {
    if (opt.levels < 3) throw InvalidParameter("mass extraction needs at least three levels");
    const double radius = field->warp() ? field->radius() : 1.0;
    const double eps0 = opt.eps0 > 0 ? opt.eps0 : default_eps0(pole, radius);
    const PoleFrame frame(field, pole, opt.conformal_normal, opt.h_fd, 4.0 * eps0);
    const SphereRule rule = sphere3_rule(opt.sphere_order);
    MassEstimate m;
    for (int k = 0; k < opt.levels; ++k) {
        const double eps = eps0 * std::pow(0.5, k);
        std::vector<double> terms(rule.dirs.size());
        for (std::size_t i = 0; i < rule.dirs.size(); ++i)
            terms[i] = rule.w[i] * (frame.weighted(G, eps * rule.dirs[i]) - 1.0 / (eps * eps));
        m.eps.push_back(eps);
        m.means.push_back(neumaier_sum(terms) / (2.0 * pi * pi));
    }
    const int n = opt.levels;
    const double fine = extrapolate_quadratic(&m.eps[n - 3], &m.means[n - 3]);
    const double coarse = extrapolate_quadratic(&m.eps[n - 4 >= 0 ? n - 4 : 0], &m.means[n - 4 >= 0 ? n - 4 : 0]);
    m.A = fine;
    m.error = std::abs(fine - coarse) + 64.0 * std::numeric_limits<double>::epsilon() * std::abs(m.means.back()) *
                                            (1.0 / (m.eps.back() * m.eps.back())) / std::max(1.0, std::abs(fine));
    return m;
}

double continuity_nu(double eps, double tau, double A) {
    require(eps > 0 && tau > 0, "matching needs eps, tau > 0");
    const double lhs = constants().c4 / eps / (1.0 + tau * tau / (eps * eps));
    return (1.0 / (tau * tau) + A) / lhs;
}

GreenExpansion green_expansion(FieldPtr field, double t, double delta, const SweepOptions& opt) {
    if (!(t > 0.0 && t < delta / 4)) throw InvalidParameter("sweep points must lie in (0, delta/4)");
    GreenProblem p{field, t * Vec4::Unit(0), delta, opt.resolution};
    GreenProblem pm = p;
    pm.pole = -p.pole;
    auto gx = std::make_shared<GreenFunction>(solve_dirichlet_green(p));
    auto gmx = std::make_shared<GreenFunction>(solve_dirichlet_green(pm));
    const QuotientGreen q = assemble_equivariant(gx, gmx, opt.datum);
    auto G = [&q](const Vec4& y) { return q(y); };
    const MassEstimate m = extract_mass(G, field, p.pole, opt.mass);
    GreenExpansion e;
    e.t = t;
    e.A = m.A;
    e.A_error = m.error;
    e.product = m.A * 4.0 * t * t;
    const double eps0 = opt.mass.eps0 > 0 ? opt.mass.eps0 : default_eps0(p.pole, field->radius());
    const PoleFrame frame(field, p.pole, opt.mass.conformal_normal, opt.mass.h_fd, 4.0 * eps0);
    for (double s : {0.25, 0.5, 1.0}) {
        const Vec4 z = s * eps0 * Vec4(0.0, 1.0, 0.0, 0.0);
        e.beta_samples.push_back({frame.to_chart(z), frame.weighted(G, z) - 1.0 / z.squaredNorm() - m.A});
    }
    if (opt.epsilon > 0) e.nu = continuity_nu(opt.epsilon, std::pow(t, opt.b), m.A);
    return e;
}

std::vector<GreenExpansion> mass_divergence_sweep(FieldPtr field, const std::vector<double>& t_grid, double delta,
                                                  const SweepOptions& opt) {
    std::vector<GreenExpansion> out(t_grid.size());
    parallel_for(static_cast<int>(t_grid.size()), opt.threads,
                 [&](int i) { out[i] = green_expansion(field, t_grid[i], delta, opt); });
    return out;
}

ParametrixReport parametrix_residual(FieldPtr field, const Vec4& pole, const std::vector<double>& radii, bool conformal,
                                     int directions) {
    const double t = pole.norm();
    if (conformal && !(t > 0.0)) throw InvalidParameter("conformal parametrix needs a pole away from the tip");
    double rmax = 0.0;
    for (double r : radii) {
        if (!(r > 0.0)) throw InvalidParameter("sample radii must be positive");
        rmax = std::max(rmax, r);
    }
    const auto chart = best_normal_chart(field, pole, 2.0 * rmax, Vec4::Unit(0));
    FieldPtr gbar = chart->field();
    if (conformal) {
        const CurvatureSnapshot s = curvature_at(*gbar, Vec4::Zero(), 1e-3);
        const CNCFactor f = cnc_polynomial(to_normal_frame(*gbar, s, Mat4::Identity()), t);
        gbar = std::make_shared<ConformalField>(gbar, [f](const Vec4& z) { return f.f(z); });
    }
    const auto dirs = sphere_samples(directions, 3);
    ParametrixReport rep;
    rep.t = t;
    for (double r : radii)
        for (const Vec4& u : dirs) {
            const GeodesicState st = geodesic_flow(*gbar, {Vec4::Zero(), u, Mat4::Zero(), Mat4::Identity()}, r, true, 1e-13);
            const MetricJet j = gbar->jet(st.x);
            Mat4 dv = Mat4::Zero();
            for (int k = 0; k < 4; ++k) dv += st.v(k) * j.dg[k];
            const double dlog = (st.Xi.inverse() * st.dXi).trace() - 4.0 / r + 0.5 * (j.g.inverse() * dv).trace();
            const double R = curvature_from_jet(j).R;
            const double v = 2.0 * conformal_a * dlog / (r * r * r) + R / (r * r);
            rep.samples.push_back({r, v});
            rep.sup = std::max(rep.sup, std::abs(v));
        }
    return rep;
}

ScalingFit parametrix_scaling(FieldPtr field, const std::vector<double>& t_grid, int threads) {
    if (t_grid.size() < 2) throw InvalidParameter("scaling fit needs at least two values of t");
    ScalingFit fit;
    fit.t = t_grid;
    fit.sup.assign(t_grid.size(), 0.0);
    parallel_for(static_cast<int>(t_grid.size()), threads, [&](int i) {
        const double t = t_grid[i];
        std::vector<double> radii;
        for (int k = 1; k <= 8; ++k) radii.push_back(t * k / 16.0 * (k == 8 ? 0.999 : 1.0));
        fit.sup[i] = parametrix_residual(field, t * Vec4::Unit(0), radii, true).sup;
    });
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double x = std::log(t_grid[i]), y = std::log(fit.sup[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.constant = std::exp((sy - fit.exponent * sx) / n);
    return fit;
}

double WeakFormCheck::defect() const { return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300); }

WeakFormCheck weak_form_check(const std::function<double(const Vec4&)>& G, const MetricField& field,
                              const Vec4& pole, double delta, const ScalarJetFn& psi, const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    s.grading_center = pole;
    if (s.grading_scale <= 0) s.grading_scale = 0.05 * delta;
    const Warp* w = field.warp();
    auto integrand = [&](const Vec4& y) {
        const Jet2 p = psi(y);
        if (p.v == 0.0 && p.g.isZero() && p.H.isZero()) return 0.0;
        const MetricJet j = field.jet(y);
        const double R = w ? w->scalar_curvature(y.norm()) : curvature_from_jet(j).R;
        const double Lpsi = -conformal_a * laplacian(j, p.g, p.H) + R * p.v;
        return G(y) * Lpsi * std::sqrt(j.g.determinant());
    };
    const IntegralResult r = integrate_ball4(integrand, delta, s);
    WeakFormCheck c;
    c.lhs = r.value;
    c.error = r.error_estimate;
    c.rhs = 4.0 * conformal_a * pi * pi * psi(pole).v;
    return c;
}

}  // namespace cyl
