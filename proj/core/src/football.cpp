#include "cyl/football.hpp"

#include <cmath>

#include "cyl/constants.hpp"
#include "cyl/normal_coords.hpp"

namespace cyl {

FootballModel::FootballModel(double d) : delta(d) {
    if (!(d > 0.0 && d < pi / 4)) throw InvalidParameter("football chart scale delta must lie in (0, pi/4)");
}

std::shared_ptr<RoundSphereField> FootballModel::lifted_field() const {
    return std::make_shared<RoundSphereField>(std::min(3.0, 4.0 * delta));
}

double FootballModel::volume() { return 4.0 * pi * pi / 3.0; }

double FootballModel::pole_distance() { return pi; }

Vec5 FootballModel::to_sphere(const Vec4& y, int pole) {
    Vec5 X = SphereNormalChart::embed(y);
    if (pole < 0) X(0) = -X(0);
    return X;
}

Vec4 FootballModel::to_chart(const Vec5& X, int pole) {
    Vec5 Y = X;
    if (pole < 0) Y(0) = -Y(0);
    return SphereNormalChart::unembed(Y);
}

Vec5 FootballModel::involution(const Vec5& X) {
    Vec5 Y = -X;
    Y(0) = X(0);
    return Y;
}

Vec5 FootballModel::meridian(double s) {
    Vec5 X = Vec5::Zero();
    X(0) = std::cos(s);
    X(1) = std::sin(s);
    return X;
}

double FootballModel::sphere_green(const Vec5& X, const Vec5& Y) { return 1.0 / (X - Y).squaredNorm(); }

double FootballModel::quotient_green(const Vec5& Q, const Vec5& Y) {
    return sphere_green(Q, Y) + sphere_green(involution(Q), Y);
}

double FootballModel::mass(double t) {
    if (!(t > 0.0 && t < pi)) throw InvalidParameter("distance to the tip must lie in (0, pi)");
    const double s = std::sin(t);
    return 1.0 / (4.0 * s * s);
}

}  // namespace cyl
