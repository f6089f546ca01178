#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "cyl/types.hpp"

namespace cyl {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 20000;
    // Optional point and length scale for graded refinement near a bubble core.
    std::optional<Vec4> grading_center;
    double grading_scale = 0.0;

    void validate() const;
    QuadratureSpec scaled(double factor) const;  // tolerances multiplied by factor
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;

    IntegralResult& operator+=(const IntegralResult& o);
};

// A 1-D integration axis cut into pieces by breakpoints; infinite ends are
// compactified with x = a + L tan(theta).
class Axis {
public:
    Axis(std::vector<double> breakpoints, double tail_scale = 1.0);
    int pieces() const { return static_cast<int>(bp_.size()) - 1; }
    // Map u in [0,1] on a piece to x; returns dx/du through jac.
    double map(int piece, double u, double& jac) const;
    const std::vector<double>& breakpoints() const { return bp_; }

private:
    std::vector<double> bp_;
    double tail_;
};

// Dyadic breakpoints c +- scale*2^k, k = -2.., clipped to [lo, hi].
std::vector<double> dyadic_breakpoints(double c, double scale, double lo, double hi);
std::vector<double> merge_breakpoints(std::vector<double> a, double lo, double hi);

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
using Fn4 = std::function<double(const Vec4&)>;

IntegralResult integrate_axis(const Fn1& f, const Axis& axis, const QuadratureSpec& spec);
IntegralResult integrate_2d(const Fn2& f, const Axis& ax, const Axis& ay, const QuadratureSpec& spec);

// Integral of f over [a,b]; b may be +inf.
IntegralResult integrate_interval(const Fn1& f, double a, double b, const QuadratureSpec& spec,
                                  std::vector<double> extra_breaks = {});

// Integral over [0,R] (R may be inf) with grading around spec.grading_center's
// first coordinate treated as a radius.
IntegralResult integrate_radial(const Fn1& f, double R, const QuadratureSpec& spec);

struct BiradialDomain {
    double zeta_min = -inf;
    double zeta_max = inf;
    double rho_max = inf;
    std::vector<double> zeta_centers;  // axial positions of bubble cores
    double core_scale = 0.0;           // 0 disables grading
};

// Integral of F(zeta,rho) 4 pi rho^2 drho dzeta.
IntegralResult integrate_biradial(const Fn2& F, const BiradialDomain& dom, const QuadratureSpec& spec);

// Integral over the ball B_radius(center); polar coordinates are taken about
// spec.grading_center when set (it must lie inside the ball).
IntegralResult integrate_ball4(const Fn4& f, double radius, const QuadratureSpec& spec,
                               const Vec4& center = Vec4::Zero());

// Surface integral over the 3-sphere of radius tau about center.
IntegralResult integrate_sphere3(const Fn4& f, double tau, const Vec4& center, const QuadratureSpec& spec);

struct GaussRule {
    std::vector<double> x, w;  // on [-1,1]
};
const GaussRule& gauss_legendre(int n);

// Product rule on S^3 with n nodes in each polar angle and 2n in azimuth.
struct SphereRule {
    std::vector<Vec4> dirs;
    std::vector<double> w;  // sums to 2 pi^2
};
SphereRule sphere3_rule(int n);

double neumaier_sum(const std::vector<double>& v);

}  // namespace cyl
