#include "cyl/constants.hpp"

#include <cmath>

#include "cyl/types.hpp"

namespace cyl {

ClosedFormConstants sobolev_constants() {
    ClosedFormConstants k{};
    k.c4 = std::pow(6.0 / (pi * pi), 0.25);
    k.S4 = 8.0 / (k.c4 * k.c4);
    k.Y4 = 6.0 * k.S4;
    k.Ys = k.Y4 / std::sqrt(2.0);
    k.B = pi * pi * k.c4 * k.c4;
    k.A = 6.0 * k.B;
    return k;
}

const ClosedFormConstants& constants() {
    static const ClosedFormConstants k = sobolev_constants();
    return k;
}

double energy_level(int j1, int j2) {
    if (j1 < 0 || j2 < 0 || j1 + j2 < 1)
        throw InvalidParameter("energy_level needs j1, j2 >= 0 and at least one bubble");
    return std::sqrt(static_cast<double>(j1 + 2 * j2)) * (std::sqrt(2.0) / 2.0) * constants().Y4;
}

}  // namespace cyl
