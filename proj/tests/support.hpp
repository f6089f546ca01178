#pragma once

#include <doctest.h>

namespace cyltest {

// doctest::Approx adds 1 to the scale, which makes tiny values compare absolutely.
inline doctest::Approx Approx(double v) { return doctest::Approx(v).scale(0.0); }

}  // namespace cyltest
