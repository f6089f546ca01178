#include "cyl/normal_coords.hpp"

#include <cmath>

#include "cyl/ode.hpp"

namespace cyl {

Mat4 orthonormal_frame(const Mat4& g, const Vec4& first_axis) {
    Mat4 E = Mat4::Zero();
    int n = 0;
    auto add = [&](Vec4 v) {
        for (int i = 0; i < n; ++i) v -= (E.col(i).dot(g * v)) * E.col(i);
        const double nn = std::sqrt(std::max(0.0, v.dot(g * v)));
        if (nn < 1e-8) return;
        E.col(n++) = v / nn;
    };
    if (first_axis.norm() > 0) add(first_axis);
    for (int k = 0; k < 4 && n < 4; ++k) add(Vec4::Unit(k));
    if (n < 4) throw NumericalFailure("could not build an orthonormal frame");
    return E;
}

Vec4 default_first_axis(const Vec4& x) {
    const double r = x.norm();
    if (r < 1e-14) return Vec4::Unit(0);
    return -x / r;
}

FlatNormalChart::FlatNormalChart(const Vec4& x, const Vec4& first_axis) {
    x_ = x;
    E_ = orthonormal_frame(Mat4::Identity(), first_axis);
    field_ = std::make_shared<FlatField>();
}

SphereNormalChart::Vec5 SphereNormalChart::embed(const Vec4& y) {
    const double r = y.norm();
    Vec5 X;
    X(0) = std::cos(r);
    const double sr = r > 1e-8 ? std::sin(r) / r : 1.0 - r * r / 6.0;
    X.tail<4>() = sr * y;
    return X;
}

Vec4 SphereNormalChart::unembed(const Vec5& X) {
    const Vec4 v = X.tail<4>();
    const double s = v.norm();
    const double r = std::atan2(s, X(0));
    if (s < 1e-300) return Vec4::Zero();
    return (r / s) * v;
}

Eigen::Matrix<double, 5, 4> SphereNormalChart::embed_jacobian(const Vec4& y) {
    Eigen::Matrix<double, 5, 4> J;
    const double r = y.norm();
    if (r < 1e-8) {
        J.setZero();
        J.row(0) = -y.transpose();
        J.bottomRows<4>() = Mat4::Identity() * (1.0 - r * r / 6.0);
        return J;
    }
    const Vec4 u = y / r;
    const double sr = std::sin(r) / r;
    J.row(0) = -std::sin(r) * u.transpose();
    J.bottomRows<4>() = std::cos(r) * u * u.transpose() + sr * (Mat4::Identity() - u * u.transpose());
    return J;
}

SphereNormalChart::SphereNormalChart(const Vec4& x, const Vec4& first_axis, double chart_radius) {
    x_ = x;
    auto base = std::make_shared<RoundSphereField>(chart_radius);
    E_ = orthonormal_frame(base->metric(x), first_axis);
    P_ = embed(x);
    E5_ = embed_jacobian(x) * E_;
    field_ = base;
    radius_ = chart_radius;
}

Vec4 SphereNormalChart::to_chart(const Vec4& y) const {
    const double r = y.norm();
    Vec5 Q = std::cos(r) * P_;
    if (r > 0) Q += std::sin(r) / r * (E5_ * y);
    return unembed(Q);
}

Vec4 SphereNormalChart::from_chart(const Vec4& p) const {
    const Vec5 Q = embed(p);
    const double c = P_.dot(Q);
    const Vec5 w = Q - c * P_;
    const double s = w.norm();
    if (s < 1e-300) return Vec4::Zero();
    const double d = std::atan2(s, c);
    return (d / s) * (E5_.transpose() * w);
}

GeodesicState geodesic_flow(const MetricField& g, const GeodesicState& start, double T, bool jacobi,
                            double rel_tol) {
    const int n = jacobi ? 40 : 8;
    Eigen::VectorXd y(n);
    y.segment<4>(0) = start.x;
    y.segment<4>(4) = start.v;
    if (jacobi) {
        for (int a = 0; a < 4; ++a) {
            y.segment<4>(8 + 4 * a) = start.Xi.col(a);
            y.segment<4>(24 + 4 * a) = start.dXi.col(a);
        }
    }
    const double R = g.radius();
    auto rhs = [&](double, const Eigen::VectorXd& s) {
        Eigen::VectorXd d(n);
        const Vec4 x = s.segment<4>(0), v = s.segment<4>(4);
        if (!(x.norm() < R)) throw ChartBreakdown("geodesic left the chart; radius too large");
        const MetricJet j = g.jet(x);
        const Christoffel c = christoffel(j);
        d.segment<4>(0) = v;
        for (int k = 0; k < 4; ++k) d(4 + k) = -v.dot(c.G[k] * v);
        if (jacobi) {
            for (int a = 0; a < 4; ++a) {
                const Vec4 xi = s.segment<4>(8 + 4 * a), dxi = s.segment<4>(24 + 4 * a);
                d.segment<4>(8 + 4 * a) = dxi;
                for (int k = 0; k < 4; ++k) {
                    double acc = -2.0 * v.dot(c.G[k] * dxi);
                    for (int m = 0; m < 4; ++m) acc -= xi(m) * v.dot(c.dG[m][k] * v);
                    d(24 + 4 * a + k) = acc;
                }
            }
        }
        return d;
    };
    OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = rel_tol * 1e-2;
    const Eigen::VectorXd out = integrate_dp45(rhs, y, 0.0, T, opt);
    GeodesicState r;
    r.x = out.segment<4>(0);
    r.v = out.segment<4>(4);
    r.Xi.setZero();
    r.dXi.setZero();
    if (jacobi)
        for (int a = 0; a < 4; ++a) {
            r.Xi.col(a) = out.segment<4>(8 + 4 * a);
            r.dXi.col(a) = out.segment<4>(24 + 4 * a);
        }
    return r;
}

namespace {

Vec4 shoot(const MetricField& g, const Vec4& x, const Mat4& E, const Vec4& y) {
    GeodesicState s{x, E * y, Mat4::Zero(), Mat4::Zero()};
    return geodesic_flow(g, s, 1.0, false).x;
}

Mat4 shoot_differential(const MetricField& g, const Vec4& x, const Mat4& E, const Vec4& y) {
    GeodesicState s{x, E * y, Mat4::Zero(), E};
    return geodesic_flow(g, s, 1.0, true).Xi;
}

class PulledNormalField : public MetricField {
public:
    PulledNormalField(FieldPtr g, const Vec4& x, const Mat4& E, double radius, double step)
        : g_(std::move(g)), x_(x), E_(E), radius_(radius), step_(step) {}
    Mat4 metric(const Vec4& y) const override {
        GeodesicState s{x_, E_ * y, Mat4::Zero(), E_};
        const GeodesicState e = geodesic_flow(*g_, s, 1.0, true);
        return e.Xi.transpose() * g_->metric(e.x) * e.Xi;
    }
    double radius() const override { return radius_; }
    double fd_step() const override { return step_; }

private:
    FieldPtr g_;
    Vec4 x_;
    Mat4 E_;
    double radius_, step_;
};

}  // namespace

ShootingNormalChart::ShootingNormalChart(FieldPtr g, const Vec4& x, const Vec4& first_axis, double radius,
                                         double fd_step)
    : g_(std::move(g)) {
    x_ = x;
    radius_ = radius;
    E_ = orthonormal_frame(g_->metric(x), first_axis);
    field_ = std::make_shared<PulledNormalField>(g_, x_, E_, radius, fd_step);
}

Vec4 ShootingNormalChart::to_chart(const Vec4& y) const { return shoot(*g_, x_, E_, y); }

Mat4 ShootingNormalChart::differential(const Vec4& y) const { return shoot_differential(*g_, x_, E_, y); }

Vec4 ShootingNormalChart::from_chart(const Vec4& p) const {
    Vec4 y = E_.transpose() * g_->metric(x_) * (p - x_);
    for (int it = 0; it < 50; ++it) {
        GeodesicState s{x_, E_ * y, Mat4::Zero(), E_};
        const GeodesicState e = geodesic_flow(*g_, s, 1.0, true);
        const Vec4 dy = e.Xi.lu().solve(e.x - p);
        y -= dy;
        if (dy.norm() <= 1e-14 * std::max(1.0, y.norm())) break;
    }
    return y;
}

NormalCoordinates normal_coordinates(FieldPtr g, const Vec4& basepoint, double radius,
                                     std::optional<Vec4> first_axis, double fd_step) {
    if (!(radius > 0.0)) throw InvalidParameter("normal chart radius must be positive");
    if (basepoint.norm() + radius >= g->radius()) throw ChartBreakdown("normal chart ball leaves the field's chart");
    NormalCoordinates out;
    auto chart = std::make_shared<ShootingNormalChart>(g, basepoint, first_axis.value_or(default_first_axis(basepoint)),
                                                       radius, fd_step);
    out.chart = chart;
    const Mat4 g0 = chart->field()->metric(Vec4::Zero());
    out.certificate.metric_defect = (g0 - Mat4::Identity()).cwiseAbs().maxCoeff();
    double dd = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Vec4 e = Vec4::Unit(k) * fd_step;
        const Mat4 d = (chart->field()->metric(e) - chart->field()->metric(-e)) / (2 * fd_step);
        dd = std::max(dd, d.cwiseAbs().maxCoeff());
    }
    out.certificate.derivative_defect = dd;
    return out;
}

std::shared_ptr<const NormalChart> best_normal_chart(FieldPtr g, const Vec4& basepoint, double radius,
                                                     std::optional<Vec4> first_axis) {
    const Vec4 axis = first_axis.value_or(default_first_axis(basepoint));
    if (auto c = g->exact_normal_chart(basepoint, axis)) return c;
    return normal_coordinates(g, basepoint, radius, axis).chart;
}

}  // namespace cyl
