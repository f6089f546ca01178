#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cyl/metric_field.hpp"

namespace cyl {

enum class Link { S3, RP3 };

// Smooth function on R^4 restricted to the unit 3-sphere, with ambient derivatives.
struct LinkFunction {
    std::function<double(const Vec4&)> value;
    std::function<Vec4(const Vec4&)> grad;
    std::function<Mat4(const Vec4&)> hess;

    static LinkFunction constant(double c);
    static LinkFunction coordinate(int i);  // z -> z_i
    // z -> z^T Q z for symmetric Q (antipodally even, so usable on RP^3).
    static LinkFunction quadratic(const Mat4& Q);
};

// Intrinsic Hessian on the round link, as an ambient matrix acting on tangent vectors.
Mat4 link_hessian(const LinkFunction& f, const Vec4& z);
Mat4 tangent_projector(const Vec4& z);
// Orthonormal basis of T_z S^3 (columns), deterministic.
Eigen::Matrix<double, 4, 3> tangent_basis(const Vec4& z);

// Family h(s) of metrics on the link, given as ambient symmetric matrices whose
// restriction to T_z S^3 is the tensor.
struct LinkFamily {
    Link link = Link::S3;
    std::function<Mat4(double, const Vec4&)> h;
    std::function<Mat4(double, const Vec4&)> dh;  // d/ds
    int reg_order = 1;                            // k in h(s) = h0 + s^{k+1} nu
    std::string name;

    static LinkFamily exact(Link link);
    // h(s) = phi(s) h0
    static LinkFamily isotropic(Link link, std::function<double(double)> phi, std::function<double(double)> dphi,
                                int reg_order, std::string name);
    static LinkFamily football();  // sin^2 s / s^2 h0 on RP^3
    // h(s) = h0 + s H1(z)
    static LinkFamily first_order(Link link, std::function<Mat4(const Vec4&)> H1, std::string name);
    // The orbifold gauge family h(s) = h0 - s (Hess f + f h0) on RP^3.
    static LinkFamily orbifold_gauge(const LinkFunction& f);
};

struct ConeMetric {
    LinkFamily family;
    double s_max = 1.0;
    // Gram matrix of ds^2 + s^2 h(s) in the basis (d_s, tangent_basis(z)).
    Mat4 gram(double s, const Vec4& z) const;
};

// g = Phi^* of the cone metric in Cartesian coordinates, delta at the origin.
class PulledBackCone : public MetricField {
public:
    PulledBackCone(ConeMetric cone, double ball_radius, double step = 1e-4);
    Mat4 metric(const Vec4& x) const override;
    double radius() const override { return radius_; }
    double fd_step() const override { return step_; }
    int reg_order() const { return cone_.family.reg_order; }
    const ConeMetric& cone() const { return cone_; }

private:
    ConeMetric cone_;
    double radius_, step_;
};

std::shared_ptr<PulledBackCone> pullback_via_phi(const ConeMetric& cone, double ball_radius);

struct RegularityReport {
    int order;
    std::vector<double> radii;
    std::vector<double> sup;  // sup of |order-k differences| on |x| = r
    double fitted_exponent;   // slope of log sup versus log r
    double fitted_constant;   // sup ~ C r^exponent
    bool bounded;
};

RegularityReport regularity_probe(const std::function<double(const Vec4&)>& b, int order,
                                  const std::vector<double>& radii);
RegularityReport regularity_probe(const MetricField& field, int order, const std::vector<double>& radii);

// Flow of grad f / 2 on the round link for time s.
Vec4 link_flow(const LinkFunction& f, double s, const Vec4& z);
// Flow map and its ambient differential.
void link_flow_with_differential(const LinkFunction& f, double s, const Vec4& z, Vec4& out, Mat4& D);

// Pulled-back metric (1 + 2 s f) alpha^*(dr^2 + r^2 h(r)) at (s,z), Gram matrix in the
// basis (d_s, tangent_basis(z)).
Mat4 alpha_pullback(const LinkFunction& f, const LinkFamily& fam, double s, const Vec4& z);

// iota_s^* H at z from the explicit formula, 3x3 in tangent_basis(z); valid at s = 0.
Eigen::Matrix3d iota_H(const LinkFunction& f, const LinkFamily& fam, double s, const Vec4& z);

struct FirstOrderReport {
    double residual;                 // sup-norm of derivative - (h'(0) + Hess f + f h0)
    double derivative_norm;          // sup-norm of the computed derivative
    std::vector<Vec4> samples;
};

FirstOrderReport verify_first_order_identity(const LinkFunction& f, const LinkFamily& fam, double h_fd,
                                             int n_samples = 12);

// Deterministic sample points on S^3 (antipodal pairs are not deduplicated).
std::vector<Vec4> sphere_samples(int n, unsigned seed = 7);

}  // namespace cyl
