#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "cyl/jet.hpp"
#include "cyl/quadrature.hpp"
#include "cyl/types.hpp"

namespace cyl {

struct MetricJet {
    Mat4 g;
    std::array<Mat4, 4> dg;                  // dg[k] = d_k g
    std::array<std::array<Mat4, 4>, 4> ddg;  // ddg[k][l] = d_k d_l g
};

// Warped-product description g = ds^2 + w(s)^2 h0 of a radially symmetric chart
// in normal form about the origin.
struct Warp {
    std::function<double(double)> w, w1, w2;
    std::function<double(double)> scalar_curvature;
    int curvature_sign = 0;  // space-form curvature K when the warp is sin/s/sinh, else 2
};

class NormalChart;

class MetricField {
public:
    virtual ~MetricField() = default;
    virtual Mat4 metric(const Vec4& x) const = 0;
    // Default jets: centered differences of metric() with step fd_step().
    virtual MetricJet jet(const Vec4& x) const;
    virtual double radius() const { return inf; }
    virtual double fd_step() const { return 1e-4; }
    virtual bool analytic_jets() const { return false; }
    virtual const Warp* warp() const { return nullptr; }
    // Closed-form normal chart at x when the geometry admits one (space forms).
    virtual std::shared_ptr<const NormalChart> exact_normal_chart(const Vec4& x, const Vec4& first_axis) const;
};

using FieldPtr = std::shared_ptr<const MetricField>;

class FlatField : public MetricField {
public:
    Mat4 metric(const Vec4&) const override { return Mat4::Identity(); }
    MetricJet jet(const Vec4& x) const override;
    bool analytic_jets() const override { return true; }
    const Warp* warp() const override { return &warp_; }
    std::shared_ptr<const NormalChart> exact_normal_chart(const Vec4& x, const Vec4& first_axis) const override;

private:
    Warp warp_ = {[](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }, 0};
};

// g = A(q) I + B(q) x x^T with q = |x|^2.
struct RadialCoeffs {
    double A, A1, A2, B, B1, B2;  // values and q-derivatives
};

class RadialField : public MetricField {
public:
    RadialField(std::function<RadialCoeffs(double)> coeffs, double radius, std::optional<Warp> warp = {})
        : coeffs_(std::move(coeffs)), radius_(radius), warp_(std::move(warp)) {}
    Mat4 metric(const Vec4& x) const override;
    MetricJet jet(const Vec4& x) const override;
    double radius() const override { return radius_; }
    bool analytic_jets() const override { return true; }
    const Warp* warp() const override { return warp_ ? &*warp_ : nullptr; }

protected:
    std::function<RadialCoeffs(double)> coeffs_;
    double radius_;
    std::optional<Warp> warp_;
};

// Round S^4 of curvature 1 in normal coordinates about a point.
class RoundSphereField : public RadialField {
public:
    explicit RoundSphereField(double radius = 3.0);
    std::shared_ptr<const NormalChart> exact_normal_chart(const Vec4& x, const Vec4& first_axis) const override;
};

// sin^2 r / r^2 and (1 - sin^2 r / r^2)/r^2 as functions of q = r^2, with q-derivatives.
void sphere_coeffs(double q, double out[6]);

// Isotropic cone chart h(s) = (1 + s^2) h0: A = 1 + q, B = -1.
std::shared_ptr<RadialField> isotropic_cone_example(double radius = 0.5);

using ScalarJetFn = std::function<Jet2(const Vec4&)>;

// e^{F} g for a scalar F given with two derivatives.
class ConformalField : public MetricField {
public:
    ConformalField(FieldPtr base, ScalarJetFn F) : base_(std::move(base)), F_(std::move(F)) {}
    Mat4 metric(const Vec4& x) const override;
    MetricJet jet(const Vec4& x) const override;
    double radius() const override { return base_->radius(); }
    bool analytic_jets() const override { return base_->analytic_jets(); }
    const FieldPtr& base() const { return base_; }
    const ScalarJetFn& factor() const { return F_; }

private:
    FieldPtr base_;
    ScalarJetFn F_;
};

// A metric given by a callable with finite-difference jets.
class CallableField : public MetricField {
public:
    CallableField(std::function<Mat4(const Vec4&)> g, double radius, double step)
        : g_(std::move(g)), radius_(radius), step_(step) {}
    Mat4 metric(const Vec4& x) const override { return g_(x); }
    double radius() const override { return radius_; }
    double fd_step() const override { return step_; }

private:
    std::function<Mat4(const Vec4&)> g_;
    double radius_, step_;
};

struct Christoffel {
    std::array<Mat4, 4> G;                  // G[k](i,j) = Gamma^k_ij
    std::array<std::array<Mat4, 4>, 4> dG;  // dG[m][k](i,j) = d_m Gamma^k_ij
};

Christoffel christoffel(const MetricJet& j);

// Scalar Laplacian of a function given with two derivatives.
double laplacian(const MetricJet& j, const Vec4& grad, const Mat4& hess);

}  // namespace cyl
