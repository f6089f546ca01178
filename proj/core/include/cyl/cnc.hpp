#pragma once

#include <array>
#include <memory>
#include <optional>

#include "cyl/curvature.hpp"
#include "cyl/normal_coords.hpp"

namespace cyl {

// C^2 piecewise-quintic cutoff: 1 on [0,t/4], 0 on [t/2,inf).
// Returns value and first two derivatives in out[0..2].
void cutoff_profile(double s, double t, double out[3]);

struct CNCFactor {
    Vec4 basepoint = Vec4::Zero();
    Mat4 quad = Mat4::Zero();      // quadratic part z^T Q z
    std::array<double, 64> cubic{};  // symmetric C_ijk, cubic part C_ijk z^i z^j z^k
    double t_cutoff = inf;         // inf: cutoff disabled

    double cubic_at(int i, int j, int k) const { return cubic[(i * 4 + j) * 4 + k]; }
    Jet2 fbar(const Vec4& z) const;  // polynomial with z-derivatives
    Jet2 fbar(const std::array<Jet2, 4>& z) const;
    Jet2 f(const Vec4& z) const;     // phi_t(|z|) fbar(z)
};

// Assembled from a snapshot given in normal coordinates at the basepoint.
CNCFactor cnc_polynomial(const CurvatureSnapshot& normal_snapshot, double t_cutoff);

// Third-order Taylor polynomial of the inverse exponential map at x:
// normal coordinates z(p) for chart points p near x, as jets in p.
class InverseExpTaylor {
public:
    InverseExpTaylor(const MetricField& g, const Vec4& x, const Mat4& frame);
    std::array<Jet2, 4> operator()(const Vec4& p) const;
    Vec4 value(const Vec4& p) const;

private:
    Vec4 x_;
    Mat4 Einv_;
    Christoffel c_;
};

struct CNCResiduals {
    double R;        // |R_bar(x)|
    double Ric;      // max |Ric_bar_ij(x)|
    double dR;       // max |d_k R_bar(x)|
    double sym_dRic; // max |d_k Ric_ij + d_i Ric_jk + d_j Ric_ik|
    CNCFactor factor;
    double max() const;
};

enum class CNCRoute { Auto, Chart, ExactNormal };

// Builds g_bar = e^{fbar} g around x and recomputes curvature at x.
CNCResiduals verify_cnc(FieldPtr field, const Vec4& x, double h_fd, std::optional<Vec4> first_axis = {},
                        CNCRoute route = CNCRoute::Auto);

}  // namespace cyl
