#pragma once

#include <numbers>

namespace cyl {

struct ClosedFormConstants {
    double c4;  // bubble amplitude
    double S4;  // Sobolev constant
    double Y4;  // Yamabe constant of the round sphere
    double Ys;  // local Yamabe constant of a Z2 cone
    double A;   // expansion constant
    double B;   // interaction constant
};

ClosedFormConstants sobolev_constants();

// Frozen copy computed once from c4.
const ClosedFormConstants& constants();

inline constexpr double pi = std::numbers::pi;

// Conformal Laplacian coefficient a = 4(n-1)/(n-2) for n = 4.
inline constexpr double conformal_a = 6.0;

double energy_level(int j1, int j2);

}  // namespace cyl
