#pragma once

#include "cyl/types.hpp"

namespace cyl {

struct FlatBubble {
    double epsilon = 1.0;
    Vec4 center = Vec4::Zero();
};

// Normalized profile U(r) = c4/(1+r^2) and its radial derivative.
double bubble_profile(double r);
double bubble_profile_dr(double r);

double bubble_value(const FlatBubble& b, const Vec4& p);
Vec4 bubble_gradient(const FlatBubble& b, const Vec4& p);

// U_{eps,t nu}(p) + U_{eps,-t nu}(p)
double double_bubble_value(double epsilon, double t, const Vec4& nu, const Vec4& p);
Vec4 double_bubble_gradient(double epsilon, double t, const Vec4& nu, const Vec4& p);

}  // namespace cyl
