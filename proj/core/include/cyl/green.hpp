#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cyl/cnc.hpp"
#include "cyl/metric_field.hpp"
#include "cyl/quadrature.hpp"

namespace cyl {

struct GreenResolution {
    int harmonic_cutoff = 32;  // highest zonal degree L
    int radial_nodes = 40;     // Chebyshev intervals on [0, delta]
    int angular_nodes = 0;     // 0: 2L + 16
};

// Dirichlet problem for L_g G = 4 a pi^2 delta_x on the lifted ball B_delta.
// The field must be a radially symmetric chart about the tip of space-form type
// (flat or round), so the exact distance gives the parametrix.
struct GreenProblem {
    FieldPtr field;
    Vec4 pole = Vec4::Zero();
    double delta = 1.0;
    GreenResolution resolution;

    void validate() const;
};

enum class DatumKind { Zero, Global, Custom };

// Boundary datum for the harmonic part H_x; Custom data must be axisymmetric
// about the pole axis and is sampled as a function of the boundary point.
struct BoundaryDatum {
    DatumKind kind = DatumKind::Zero;
    std::function<double(const Vec4&)> custom;

    static BoundaryDatum parse(const std::string& s);
};
std::string to_string(DatumKind k);

// Axisymmetric expansion sum_l c_l(r) U_l(cos theta) about an axis through the origin.
class ZonalExpansion {
public:
    ZonalExpansion() = default;
    ZonalExpansion(Vec4 axis, double delta, std::vector<std::vector<double>> values);
    double operator()(const Vec4& y) const;
    double mode(int l, double r) const;
    int cutoff() const { return static_cast<int>(vals_.size()) - 1; }

private:
    Vec4 axis_ = Vec4::Unit(0);
    double delta_ = 1.0;
    std::vector<double> nodes_, bary_;
    std::vector<std::vector<double>> vals_;  // vals_[l][i] at Chebyshev node i
};

class GreenFunction {
public:
    GreenFunction(GreenProblem p, ZonalExpansion regular, int curvature, double mode_residual,
                  double boundary_residual);
    double operator()(const Vec4& y) const { return parametrix(y) + regular_(y); }
    double parametrix(const Vec4& y) const;
    double regular_part(const Vec4& y) const { return regular_(y); }
    const Vec4& pole() const { return problem_.pole; }
    const GreenProblem& problem() const { return problem_; }
    // Relative truncation residual of the zonal source and boundary expansions.
    double mode_residual() const { return mode_residual_; }
    double boundary_residual() const { return boundary_residual_; }

private:
    GreenProblem problem_;
    ZonalExpansion regular_;
    int K_;
    double mode_residual_, boundary_residual_;
};

// Geodesic distance in a flat (K = 0) or round (K = 1) tip-normal chart.
double space_form_distance(int K, const Vec4& a, const Vec4& b);
// -L(d^-2) away from the pole for the space form of curvature K.
double parametrix_source(int K, double d);
int space_form_curvature(const MetricField& field);

GreenFunction solve_dirichlet_green(const GreenProblem& problem);

// Solution of L H = 0 in B_delta with H = h on the boundary (harmonic extension).
ZonalExpansion solve_harmonic_extension(const GreenProblem& problem, const std::function<double(const Vec4&)>& h);

// Datum for H_x: zero, the global Green function of the lifted pair {x, -x}, or custom.
std::function<double(const Vec4&)> boundary_function(const GreenProblem& problem, const BoundaryDatum& datum);

struct QuotientGreen {
    std::shared_ptr<const GreenFunction> plus, minus;
    ZonalExpansion harmonic;
    bool has_harmonic = false;

    double operator()(const Vec4& y) const;
    // max |G(y) - G(-y)| / max |G| over the given sample points.
    double symmetry_defect(const std::vector<Vec4>& samples) const;
};

QuotientGreen assemble_equivariant(std::shared_ptr<const GreenFunction> gx, std::shared_ptr<const GreenFunction> gmx,
                                   const BoundaryDatum& datum);

struct MassOptions {
    double eps0 = 0.0;  // 0: min(|pole|, delta) / 8
    int levels = 4;
    int sphere_order = 6;
    bool conformal_normal = true;
    double h_fd = 1e-3;
};

struct MassEstimate {
    double A = 0.0;
    double error = 0.0;
    std::vector<double> eps, means;
};

// Constant term of G - |z|^-2 at the pole from spherical means at eps0 2^-k,
// in (conformal) normal coordinates about the pole.
MassEstimate extract_mass(const std::function<double(const Vec4&)>& G, FieldPtr field, const Vec4& pole,
                          const MassOptions& opt);

// nu with c4 eps^-1 / (1 + eps^-2 tau^2) = (tau^-2 + A) / nu.
double continuity_nu(double eps, double tau, double A);

struct GreenExpansion {
    double t = 0.0;
    double A = 0.0;
    double A_error = 0.0;
    double product = 0.0;  // A * 4 t^2
    std::vector<std::pair<Vec4, double>> beta_samples;
    double nu = 0.0;  // matching constant, when an epsilon was supplied
};

struct SweepOptions {
    GreenResolution resolution;
    BoundaryDatum datum;
    MassOptions mass;
    int threads = 1;
    double epsilon = 0.0;  // > 0: also record nu for tau = t^b
    double b = 1.1;
};

// Full pipeline per t: solve the lifted pair, assemble, extract the mass.
GreenExpansion green_expansion(FieldPtr field, double t, double delta, const SweepOptions& opt);
std::vector<GreenExpansion> mass_divergence_sweep(FieldPtr field, const std::vector<double>& t_grid, double delta,
                                                  const SweepOptions& opt);

struct ParametrixSample {
    double r;
    double value;
};

struct ParametrixReport {
    double t = 0.0;
    double sup = 0.0;
    std::vector<ParametrixSample> samples;
};

// L_gbar(r^-2) = (2a/r^3) d_r log sqrt|gbar| + R_gbar / r^2 in normal coordinates of
// gbar = e^{f} g about the pole, with f the cutoff CNC factor at scale t = |pole|.
ParametrixReport parametrix_residual(FieldPtr field, const Vec4& pole, const std::vector<double>& radii,
                                     bool conformal = true, int directions = 6);

struct ScalingFit {
    double exponent = 0.0;
    double constant = 0.0;
    std::vector<double> t, sup;
};
// sup over |y| < t/2 of the residual versus t, fitted as C t^p.
ScalingFit parametrix_scaling(FieldPtr field, const std::vector<double>& t_grid, int threads = 1);

// int G L psi dmu - 4 a pi^2 psi(x), relative to 4 a pi^2 |psi(x)|.
struct WeakFormCheck {
    double lhs = 0.0, rhs = 0.0, error = 0.0;
    double defect() const;
};
WeakFormCheck weak_form_check(const std::function<double(const Vec4&)>& G, const MetricField& field,
                              const Vec4& pole, double delta, const ScalarJetFn& psi, const QuadratureSpec& spec);

}  // namespace cyl
