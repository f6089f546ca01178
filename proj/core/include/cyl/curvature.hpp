#pragma once

#include <array>

#include "cyl/metric_field.hpp"

namespace cyl {

// Fully covariant 4-index tensor, index (a,b,c,d) -> ((a*4+b)*4+c)*4+d.
using Tensor4 = std::array<double, 256>;
inline constexpr int idx4(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }

struct PointCurvature {
    Mat4 g;
    Tensor4 Rm;  // R_abcd with Ric_bd = g^ac R_abcd
    Mat4 Ric;
    double R;
};

struct CurvatureSnapshot {
    Vec4 x;
    Mat4 g;
    double R = 0.0;
    Mat4 Ric = Mat4::Zero();
    Vec4 dR = Vec4::Zero();
    std::array<Mat4, 4> dRic{};  // dRic[k](i,j) = d_k Ric_ij
    Tensor4 Rm{};
    Tensor4 W{};
};

PointCurvature curvature_from_jet(const MetricJet& j);
Tensor4 weyl_tensor(const Mat4& g, const Tensor4& Rm, const Mat4& Ric, double R);

// Curvature at x in chart coordinates; derivatives of R and Ric by centered differences.
CurvatureSnapshot curvature_at(const MetricField& field, const Vec4& x, double h_fd);

// The snapshot re-expressed in normal coordinates at x with frame E (columns);
// derivatives become covariant derivatives contracted with E.
CurvatureSnapshot to_normal_frame(const MetricField& field, const CurvatureSnapshot& s, const Mat4& E);

struct IdentityDefects {
    double weyl_trace;      // max |g^ac W_abcd|
    double bianchi;         // max |R_abcd + R_acdb + R_adbc|
    double ricci_symmetry;  // max |Ric - Ric^T|
};
IdentityDefects identity_defects(const CurvatureSnapshot& s);

}  // namespace cyl
