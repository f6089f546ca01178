#include "support.hpp"

#include <cmath>
#include <random>

#include "cyl/bubbles.hpp"
#include "cyl/constants.hpp"
#include "cyl/quadrature.hpp"

using namespace cyl;
using cyltest::Approx;

namespace {

// Five-point second differences summed over the four axes.
double stencil_laplacian(const FlatBubble& b, const Vec4& p, double h) {
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        Vec4 e = Vec4::Zero();
        e(i) = h;
        s += (-bubble_value(b, p + 2 * e) + 16 * bubble_value(b, p + e) - 30 * bubble_value(b, p) +
              16 * bubble_value(b, p - e) - bubble_value(b, p - 2 * e)) /
             (12 * h * h);
    }
    return s;
}

}  // namespace

TEST_CASE("closed-form constants") {
    const auto& c = constants();
    CHECK(c.c4 == Approx(std::pow(6.0 / (pi * pi), 0.25)).epsilon(1e-15));
    CHECK(c.S4 == Approx(8 * pi / std::sqrt(6.0)).epsilon(1e-14));
    CHECK(c.A == Approx(6 * pi * std::sqrt(6.0)).epsilon(1e-14));
    CHECK(c.B == Approx(pi * std::sqrt(6.0)).epsilon(1e-14));
    CHECK(c.Y4 == Approx(6 * c.S4).epsilon(1e-15));
    CHECK(c.Ys == Approx(c.Y4 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(c.B / c.S4 == Approx(0.75).epsilon(1e-15));
    CHECK(c.c4 == Approx(0.883004417).epsilon(1e-9));
    CHECK(c.S4 == Approx(10.2603986).epsilon(1e-8));
}

TEST_CASE("amplitude from the Beta integral c4^4 pi^2 / 6 = 1") {
    // int_0^inf r^3/(1+r^2)^4 dr = B(2,2)/2
    const double beta = std::tgamma(2.0) * std::tgamma(2.0) / std::tgamma(4.0) / 2.0;
    const double c4 = std::pow(2 * pi * pi * beta, -0.25);
    CHECK(constants().c4 == Approx(c4).epsilon(1e-15));
}

TEST_CASE("normalization and Dirichlet energy by radial quadrature") {
    QuadratureSpec s;
    s.rel_tol = 1e-12;
    const auto l4 = integrate_radial(
        [](double r) { return 2 * pi * pi * r * r * r * std::pow(bubble_profile(r), 4); }, inf, s);
    CHECK(l4.converged);
    CHECK(std::abs(l4.value - 1.0) < 1e-10);
    const auto dir = integrate_radial(
        [](double r) { return 2 * pi * pi * r * r * r * std::pow(bubble_profile_dr(r), 2); }, inf, s);
    CHECK(std::abs(dir.value - constants().S4) < 1e-8);
}

TEST_CASE("bubble values") {
    const double c4 = constants().c4;
    CHECK(bubble_value({1.0, Vec4::Zero()}, Vec4::Zero()) == Approx(c4));
    CHECK(bubble_value({1.0, Vec4::Zero()}, Vec4(0, 0.6, 0, 0.8)) == Approx(c4 / 2));
    CHECK(bubble_value({2.0, Vec4::Zero()}, Vec4::Zero()) == Approx(c4 / 2));
    CHECK(bubble_gradient({1.0, Vec4::Zero()}, Vec4::Zero()).norm() < 1e-15);
    const Vec4 g = bubble_gradient({1.0, Vec4::Zero()}, Vec4::Unit(0));
    CHECK(g(0) == Approx(-c4 / 2));
    CHECK(g.tail<3>().norm() < 1e-15);
}

TEST_CASE("gradient matches central differences") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const FlatBubble b{0.3 + 0.5 * (u(rng) + 1), Vec4(u(rng), u(rng), u(rng), u(rng))};
        const Vec4 p(u(rng), u(rng), u(rng), u(rng));
        const Vec4 g = bubble_gradient(b, p);
        for (int i = 0; i < 4; ++i) {
            const double h = 1e-5;
            const Vec4 e = h * Vec4::Unit(i);
            CHECK(g(i) == Approx((bubble_value(b, p + e) - bubble_value(b, p - e)) / (2 * h)).epsilon(1e-7));
        }
    }
}

TEST_CASE("property: stencil Laplacian solves -Lap u = S4 u^3 to discretization order") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double S4 = constants().S4;
    for (int k = 0; k < 20; ++k) {
        const FlatBubble b{0.5 + 0.5 * (u(rng) + 1), Vec4(u(rng), u(rng), u(rng), u(rng))};
        const Vec4 p(u(rng), u(rng), u(rng), u(rng));
        auto residual = [&](double h) {
            return std::abs(-stencil_laplacian(b, p, h) - S4 * std::pow(bubble_value(b, p), 3));
        };
        const double r1 = residual(2e-2), r2 = residual(1e-2);
        CHECK(r1 < 1e-4);
        // fourth-order stencil: halving h cuts the residual about 16x
        CHECK(r2 < r1 / 8);
    }
}

TEST_CASE("double bubble") {
    const double c4 = constants().c4;
    const Vec4 nu = Vec4::Unit(0);
    const Vec4 p(0.2, -0.1, 0.3, 0.05);
    CHECK(double_bubble_value(0.7, 0.0, nu, p) == Approx(2 * bubble_value({0.7, Vec4::Zero()}, p)));
    CHECK(double_bubble_value(1.0, 1.0, nu, Vec4::Zero()) == Approx(c4));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Vec4 n2 = Vec4(1, 2, -1, 0.5).normalized();
    for (int k = 0; k < 25; ++k) {
        const Vec4 q(u(rng), u(rng), u(rng), u(rng));
        CHECK(double_bubble_value(0.4, 0.9, n2, q) == Approx(double_bubble_value(0.4, 0.9, n2, -q)).epsilon(1e-14));
    }
}

TEST_CASE("energy levels") {
    const auto& c = constants();
    CHECK(energy_level(1, 0) == Approx(c.Y4 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(energy_level(0, 1) == Approx(c.Y4).epsilon(1e-14));
    CHECK(energy_level(2, 0) == Approx(energy_level(0, 1)).epsilon(1e-15));
    CHECK(energy_level(1, 1) == Approx(std::sqrt(3.0) * c.Y4 / std::sqrt(2.0)).epsilon(1e-14));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a + b == 0) continue;
            CHECK(energy_level(a + 1, b) > energy_level(a, b));
            CHECK(energy_level(a, b + 1) > energy_level(a, b));
        }
    CHECK_THROWS(energy_level(0, 0));
    CHECK_THROWS(energy_level(-1, 2));
}
