#pragma once

#include <memory>

#include "cyl/cone.hpp"
#include "cyl/metric_field.hpp"

namespace cyl {

using Vec5 = Eigen::Matrix<double, 5, 1>;

// The suspension of RP^3: round S^4 modulo (X0, X') -> (X0, -X'), with conical
// points N = (1,0,0,0,0) and S = (-1,0,0,0,0) at distance pi.
struct FootballModel {
    explicit FootballModel(double delta = 0.4);

    double delta;  // conical chart scale; lifted charts cover B_{2 delta}

    LinkFamily link_family() const { return LinkFamily::football(); }
    ConeMetric cone() const { return ConeMetric{link_family(), 2.0 * delta}; }
    // Lifted metric in normal coordinates about either tip (both charts agree).
    std::shared_ptr<RoundSphereField> lifted_field() const;

    static double volume();         // 4 pi^2 / 3
    static double pole_distance();  // pi

    // sigma_P lifted: tip-normal chart point about pole (+1: N, -1: S) to S^4.
    static Vec5 to_sphere(const Vec4& y, int pole);
    static Vec4 to_chart(const Vec5& X, int pole);
    static Vec5 involution(const Vec5& X);
    // Point at geodesic distance s from N along the meridian through e1.
    static Vec5 meridian(double s);

    // Green function of the conformal Laplacian on round S^4, normalized to 4 a pi^2.
    static double sphere_green(const Vec5& X, const Vec5& Y);
    // Lift of the quotient Green function G(q, .) with q represented by Q.
    static double quotient_green(const Vec5& Q, const Vec5& Y);
    // Mass of the quotient Green function at distance t from a tip, in
    // conformal normal coordinates.
    static double mass(double t);
};

}  // namespace cyl
