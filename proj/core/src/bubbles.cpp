#include "cyl/bubbles.hpp"

#include <cmath>

#include "cyl/constants.hpp"

namespace cyl {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("bubble epsilon must be positive");
}

void check_nu(const Vec4& nu) {
    if (std::abs(nu.norm() - 1.0) > 1e-12) throw InvalidParameter("double bubble direction must be a unit vector");
}

}  // namespace

double bubble_profile(double r) { return constants().c4 / (1.0 + r * r); }

double bubble_profile_dr(double r) {
    const double d = 1.0 + r * r;
    return -2.0 * constants().c4 * r / (d * d);
}

double bubble_value(const FlatBubble& b, const Vec4& p) {
    check_eps(b.epsilon);
    const double q = (p - b.center).squaredNorm() / (b.epsilon * b.epsilon);
    return constants().c4 / (b.epsilon * (1.0 + q));
}

Vec4 bubble_gradient(const FlatBubble& b, const Vec4& p) {
    check_eps(b.epsilon);
    const double e2 = b.epsilon * b.epsilon;
    const Vec4 d = p - b.center;
    const double den = 1.0 + d.squaredNorm() / e2;
    return (-2.0 * constants().c4 / (b.epsilon * e2 * den * den)) * d;
}

double double_bubble_value(double epsilon, double t, const Vec4& nu, const Vec4& p) {
    check_eps(epsilon);
    check_nu(nu);
    return bubble_value({epsilon, t * nu}, p) + bubble_value({epsilon, -t * nu}, p);
}

Vec4 double_bubble_gradient(double epsilon, double t, const Vec4& nu, const Vec4& p) {
    check_eps(epsilon);
    check_nu(nu);
    return bubble_gradient({epsilon, t * nu}, p) + bubble_gradient({epsilon, -t * nu}, p);
}

}  // namespace cyl
