#pragma once

#include <memory>
#include <optional>

#include "cyl/metric_field.hpp"

namespace cyl {

// Frame at x, g(x)-orthonormal, obtained by Gram-Schmidt starting from first_axis.
Mat4 orthonormal_frame(const Mat4& g, const Vec4& first_axis);

// Radial direction toward the chart origin, e1 at the origin itself.
Vec4 default_first_axis(const Vec4& x);

class NormalChart {
public:
    virtual ~NormalChart() = default;
    // y (normal coordinates) -> chart point exp_x(E y)
    virtual Vec4 to_chart(const Vec4& y) const = 0;
    virtual Vec4 from_chart(const Vec4& p) const = 0;
    // Metric expressed in the normal coordinates.
    const FieldPtr& field() const { return field_; }
    const Vec4& basepoint() const { return x_; }
    const Mat4& frame() const { return E_; }
    double radius() const { return radius_; }

protected:
    FieldPtr field_;
    Vec4 x_ = Vec4::Zero();
    Mat4 E_ = Mat4::Identity();
    double radius_ = inf;
};

class FlatNormalChart : public NormalChart {
public:
    FlatNormalChart(const Vec4& x, const Vec4& first_axis);
    Vec4 to_chart(const Vec4& y) const override { return x_ + E_ * y; }
    Vec4 from_chart(const Vec4& p) const override { return E_.transpose() * (p - x_); }
};

// Exact normal chart of the round S^4 chart, built through the embedding in R^5.
class SphereNormalChart : public NormalChart {
public:
    SphereNormalChart(const Vec4& x, const Vec4& first_axis, double chart_radius);
    Vec4 to_chart(const Vec4& y) const override;
    Vec4 from_chart(const Vec4& p) const override;

    using Vec5 = Eigen::Matrix<double, 5, 1>;
    static Vec5 embed(const Vec4& y);
    static Vec4 unembed(const Vec5& X);
    static Eigen::Matrix<double, 5, 4> embed_jacobian(const Vec4& y);

private:
    Vec5 P_;
    Eigen::Matrix<double, 5, 4> E5_;
};

struct GeodesicState {
    Vec4 x, v;
    Mat4 Xi, dXi;  // Jacobi matrix and its coordinate derivative
};

// Integrates the geodesic (and optionally the Jacobi matrix) for parameter length T.
GeodesicState geodesic_flow(const MetricField& g, const GeodesicState& start, double T, bool jacobi,
                            double rel_tol = 1e-12);

class ShootingNormalChart : public NormalChart {
public:
    ShootingNormalChart(FieldPtr g, const Vec4& x, const Vec4& first_axis, double radius, double fd_step);
    Vec4 to_chart(const Vec4& y) const override;
    Vec4 from_chart(const Vec4& p) const override;
    // D exp at y in chart components (columns = images of the normal basis vectors).
    Mat4 differential(const Vec4& y) const;

private:
    FieldPtr g_;
};

struct NormalCertificate {
    double metric_defect;      // max |g_N(0) - I|
    double derivative_defect;  // max |d g_N(0)|
};

struct NormalCoordinates {
    std::shared_ptr<const NormalChart> chart;
    NormalCertificate certificate;
};

// Geodesic-shooting normal coordinates with certification of g(0) = I, dg(0) = 0.
NormalCoordinates normal_coordinates(FieldPtr g, const Vec4& basepoint, double radius,
                                     std::optional<Vec4> first_axis = {}, double fd_step = 1e-4);

// Exact chart when the field provides one, shooting otherwise.
std::shared_ptr<const NormalChart> best_normal_chart(FieldPtr g, const Vec4& basepoint, double radius,
                                                     std::optional<Vec4> first_axis = {});

}  // namespace cyl
