#include "support.hpp"

#include <cmath>
#include <random>

#include "cyl/bubbles.hpp"
#include "cyl/constants.hpp"
#include "cyl/quadrature.hpp"

using namespace cyl;
using cyltest::Approx;

namespace {

QuadratureSpec tight(double rel = 1e-11) {
    QuadratureSpec s;
    s.rel_tol = rel;
    s.abs_tol = 1e-15;
    return s;
}

double U(double r) { return bubble_profile(r); }

}  // namespace

TEST_CASE("radial integrals") {
    CHECK(integrate_radial([](double r) { return r * r * r; }, 1.0, tight()).value == Approx(0.25).epsilon(1e-12));
    CHECK(integrate_radial([](double r) { return r * r * r / std::pow(1 + r * r, 4); }, inf, tight()).value ==
          Approx(1.0 / 12).epsilon(1e-12));
    const auto n = integrate_radial([](double r) { return std::pow(U(r), 4) * 2 * pi * pi * r * r * r; }, inf, tight());
    CHECK(n.converged);
    CHECK(n.value == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("interval and Gauss rules") {
    const auto& g = gauss_legendre(12);
    double s = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], 22);
    CHECK(s == Approx(2.0 / 23).epsilon(1e-13));
    CHECK(integrate_interval([](double x) { return std::exp(-x); }, 0.0, inf, tight()).value ==
          Approx(1.0).epsilon(1e-11));
    CHECK(integrate_interval([](double x) { return std::sqrt(x); }, 0.0, 1.0, tight()).value ==
          Approx(2.0 / 3).epsilon(1e-10));
    const auto& rule = sphere3_rule(6);
    double area = 0;
    for (double w : rule.w) area += w;
    CHECK(area == Approx(2 * pi * pi).epsilon(1e-13));
    CHECK(neumaier_sum({1.0, 1e100, 1.0, -1e100}) == 2.0);
}

TEST_CASE("biradial integrals") {
    BiradialDomain box;
    box.zeta_min = 0;
    box.zeta_max = 1;
    box.rho_max = 1;
    CHECK(integrate_biradial([](double, double) { return 1.0; }, box, tight()).value ==
          Approx(4 * pi / 3).epsilon(1e-12));

    for (double t : {0.0, 3.0, 40.0}) {
        BiradialDomain d;
        d.zeta_centers = {t};
        d.core_scale = 1.0;
        const auto r = integrate_biradial(
            [t](double z, double rho) { return std::pow(U(std::hypot(z - t, rho)), 4); }, d, tight());
        CHECK(r.value == Approx(1.0).epsilon(1e-9));
    }

    const double t = 50;
    BiradialDomain d;
    d.zeta_centers = {-t, t};
    d.core_scale = 1.0;
    const auto r = integrate_biradial(
        [t](double z, double rho) { return std::pow(U(std::hypot(z - t, rho)), 3) * U(std::hypot(z + t, rho)); }, d,
        tight(1e-10));
    CHECK(r.value == Approx(0.75 / (t * t)).epsilon(0.02));
}

TEST_CASE("ball integrals") {
    CHECK(integrate_ball4([](const Vec4&) { return 1.0; }, 1.0, tight()).value == Approx(pi * pi / 2).epsilon(1e-11));
    CHECK(integrate_ball4([](const Vec4& x) { return x.squaredNorm(); }, 1.0, tight()).value ==
          Approx(pi * pi / 3).epsilon(1e-11));
    QuadratureSpec s = tight(1e-9);
    s.grading_center = Vec4::Zero();
    s.grading_scale = 1.0;
    const double v = integrate_ball4([](const Vec4& x) { return std::pow(U(x.norm()), 4); }, 10.0, s).value;
    const double c4 = constants().c4;
    // exact tail: int_{r>R} U^4 = c4^4 pi^2 (3R^2 + 1) / (6 (1+R^2)^3)
    const double tail = std::pow(c4, 4) * pi * pi * (3 * 100.0 + 1) / (6 * std::pow(101.0, 3));
    CHECK(v == Approx(1.0 - tail).epsilon(1e-8));
    CHECK(1.0 - v < 5e-4);
}

TEST_CASE("sphere integrals") {
    CHECK(integrate_sphere3([](const Vec4&) { return 1.0; }, 1.0, Vec4::Zero(), tight()).value ==
          Approx(2 * pi * pi).epsilon(1e-12));
    for (double tau : {0.3, 1.0, 2.5})
        CHECK(std::abs(integrate_sphere3([](const Vec4& x) { return x(2); }, tau, Vec4(0.1, 0, 0, 0), tight()).value) <
              1e-12);
    const double eps = 0.2, tau = 0.5, c4 = constants().c4;
    const Vec4 x0(0.3, -0.2, 0.1, 0.0);
    const FlatBubble b{eps, x0};
    const auto flux = integrate_sphere3(
        [&](const Vec4& p) {
            const Vec4 n = (p - x0).normalized();
            return bubble_gradient(b, p).dot(n) * bubble_value(b, p);
        },
        tau, x0, tight());
    const double q = tau * tau / (eps * eps);
    const double exact = 2 * pi * pi * std::pow(tau, 3) * (-2 * c4 * c4 * std::pow(eps, -4) * tau / std::pow(1 + q, 3));
    CHECK(flux.value == Approx(exact).epsilon(1e-11));
}

TEST_CASE("property: error contract under 10x tighter tolerance") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int k = 0; k < 12; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng);
        auto f = [=](double r) { return r * r * r * std::exp(-a * r) / (1 + b * r * r) + c / (1 + r * r * r * r * r); };
        QuadratureSpec s;
        s.rel_tol = 1e-7;
        s.abs_tol = 1e-12;
        const auto coarse = integrate_radial(f, inf, s);
        const auto fine = integrate_radial(f, inf, s.scaled(0.1));
        REQUIRE(coarse.converged);
        CHECK(std::abs(coarse.value - fine.value) <= coarse.error_estimate);
    }
}

TEST_CASE("property: biradial and ball integration agree on axial integrands") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.3, 1.5);
    for (int k = 0; k < 20; ++k) {
        const double a = u(rng), b = u(rng) - 0.9, c = u(rng);
        // compactly supported in the unit ball, axial about e1
        auto F = [=](double z, double rho) {
            const double r2 = z * z + rho * rho;
            return r2 >= 1 ? 0.0 : std::pow(1 - r2, 3) * (a + b * z + c * z * z * rho);
        };
        BiradialDomain d;
        d.zeta_min = -1;
        d.zeta_max = 1;
        d.rho_max = 1;
        QuadratureSpec s = tight(1e-10);
        const auto bi = integrate_biradial(F, d, s);
        const auto ball = integrate_ball4([&](const Vec4& x) { return F(x(0), x.tail<3>().norm()); }, 1.0, s);
        CHECK(std::abs(bi.value - ball.value) <= bi.error_estimate + ball.error_estimate + 1e-12);
    }
}

TEST_CASE("property: estimates form a Cauchy sequence under refinement") {
    auto f = [](double r) { return std::sqrt(r) * std::cos(3 * r) + 1 / (1 + 40 * (r - 0.7) * (r - 0.7)); };
    std::vector<double> v;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        QuadratureSpec s;
        s.rel_tol = tol;
        v.push_back(integrate_interval(f, 0.0, 2.0, s).value);
    }
    for (std::size_t i = 2; i < v.size(); ++i) CHECK(std::abs(v[i] - v[i - 1]) <= std::abs(v[i - 1] - v[i - 2]) + 1e-14);
}

TEST_CASE("invalid specs are rejected") {
    QuadratureSpec s;
    s.rel_tol = -1;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    CHECK_THROWS(Axis({1.0, 0.0}));
}
