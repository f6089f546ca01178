#include "support.hpp"

#include <cmath>
#include <random>

#include "cyl/bubbles.hpp"
#include "cyl/constants.hpp"
#include "cyl/interaction.hpp"

using namespace cyl;
using cyltest::Approx;

namespace {

const QuadratureSpec& spec() {
    static const QuadratureSpec s = interaction_default_spec();
    return s;
}

}  // namespace

TEST_CASE("curves near coincidence and far apart") {
    const auto& c = constants();
    const CurvePoint near = curve_point(1e-3, spec());
    CHECK(near.a == Approx(24 * c.S4).epsilon(1e-5));
    CHECK(near.b == Approx(4.0).epsilon(1e-5));
    CHECK(near.f == Approx(6 * c.S4).epsilon(1e-5));

    const CurvePoint far = curve_point(1e3, spec());
    const double correction = far.f - 6 * std::sqrt(2.0) * c.S4;
    CHECK(correction / 1e-6 == Approx(-6 * std::sqrt(2.0) * c.B).epsilon(0.05));

    const CurvePoint one = curve_point(1.0, spec());
    CHECK(one.f > 6 * c.S4 + 3 * one.f_err);
    CHECK(one.f < 6 * std::sqrt(2.0) * c.S4 - 3 * one.f_err);
}

TEST_CASE("pair integrals at large separation") {
    CHECK(interaction_integral(InteractionKind::GRAD, 1.0, 100.0, spec()).value ==
          Approx(pi * std::sqrt(6.0) * 1e-4).epsilon(0.02));
    CHECK(interaction_integral(InteractionKind::U3V, 1.0, 100.0, spec()).value == Approx(0.75e-4).epsilon(0.02));
    // Far-field oracle: int U+^2 U-^2 ~ 2 U(2t)^2 int_{|x|<t} U^2 = 1.5 (log t + C) / t^4.
    auto scaled = [](double t) {
        return interaction_integral(InteractionKind::U2V2, 1.0, t, spec()).value * std::pow(t, 4) / 1.5 - std::log(t);
    };
    const double c100 = scaled(100), c200 = scaled(200), c400 = scaled(400);
    CHECK(std::abs(c200 - c100) < 0.02);
    CHECK(std::abs(c400 - c200) < 0.01);
    CHECK(c400 == Approx(0.19).epsilon(0.3));
}

TEST_CASE("property: bracket holds on a geometric grid") {
    std::vector<double> grid;
    for (int i = 0; i < 15; ++i) grid.push_back(0.1 * std::pow(1e4, i / 14.0));
    const auto cv = curves(1.0, grid, spec(), 2);
    const double lo = 6 * constants().S4, hi = 6 * std::sqrt(2.0) * constants().S4;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(cv.f[i] - lo > 3 * cv.f_err[i]);
        CHECK(hi - cv.f[i] > 3 * cv.f_err[i]);
    }
}

TEST_CASE("property: curves depend only on t / eps") {
    for (double ratio : {0.3, 2.0, 17.0}) {
        const auto a = curves(1.0, {ratio}, spec());
        const auto b = curves(0.25, {0.25 * ratio}, spec());
        const auto c = curves(3.0, {3.0 * ratio}, spec());
        CHECK(std::abs(a.f[0] - b.f[0]) <= a.f_err[0] + b.f_err[0] + 1e-13);
        CHECK(std::abs(a.f[0] - c.f[0]) <= a.f_err[0] + c.f_err[0] + 1e-13);
        CHECK(std::abs(a.a[0] - c.a[0]) <= a.a_err[0] + c.a_err[0] + 1e-12);
    }
}

TEST_CASE("property: mirrored term and integration by parts") {
    for (double t : {0.2, 1.0, 5.0, 30.0}) {
        const auto u3v = interaction_integral(InteractionKind::U3V, 1.0, t, spec());
        const auto u1v3 = interaction_u1v3(1.0, t, spec());
        CHECK(std::abs(u3v.value - u1v3.value) <= u3v.error_estimate + u1v3.error_estimate + 1e-15);
        const auto grad = interaction_integral(InteractionKind::GRAD, 1.0, t, spec());
        const double S4 = constants().S4;
        CHECK(std::abs(grad.value - S4 * u3v.value) <= grad.error_estimate + S4 * u3v.error_estimate + 1e-14);
    }
}

TEST_CASE("derivative identity for b") {
    for (double t : {0.5, 2.0}) {
        const double r1 = verify_b_prime_identity(1.0, t, 1e-3, spec());
        const double r2 = verify_b_prime_identity(1.0, t, 5e-4, spec());
        CHECK(r1 < 1e-5);
        CHECK(r1 / r2 == Approx(4.0).epsilon(0.15));
    }
    CHECK_THROWS_AS(verify_b_prime_identity(1.0, 1e-3, 1e-2, spec()), InvalidParameter);
}

TEST_CASE("monotonicity of a and c") {
    const auto rep = verify_monotonicity(1.0, {0.25, 0.5, 1, 2, 4, 8}, spec(), 2);
    CHECK(rep.passed);
    for (const auto& r : rep.rows) {
        CHECK(r.a_fd < 0);
        CHECK(r.a_quad < 0);
        CHECK(r.c_fd < 0);
        CHECK(r.c_quad < 0);
        CHECK(std::abs(r.a_fd - r.a_quad) <= r.a_fd_err + r.a_quad_err);
        CHECK(std::abs(r.c_fd - r.c_quad) <= r.c_fd_err + r.c_quad_err);
    }
    CHECK_THROWS_AS(verify_monotonicity(1.0, {1.0, 0.5}, spec()), InvalidParameter);

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        const double z = u(rng), rho = u(rng), t = u(rng) + 1e-3;
        CHECK(std::pow(bubble_profile(std::hypot(z - 2 * t, rho)), 3) -
                  std::pow(bubble_profile(std::hypot(z + 2 * t, rho)), 3) >=
              0.0);
    }
}

TEST_CASE("asymptotic slopes") {
    const std::vector<double> ts{10, 20, 40, 80, 160};
    const auto& c = constants();
    CHECK(asymptotic_slope(InteractionKind::GRAD, 1.0, ts, spec(), 2).coeff == Approx(c.B).epsilon(0.02));
    CHECK(asymptotic_slope(InteractionKind::U3V, 1.0, ts, spec(), 2).coeff == Approx(0.75).epsilon(0.02));
    const auto f = asymptotic_slope(InteractionKind::FCURVE, 1.0, ts, spec(), 2);
    CHECK(f.coeff == Approx(-6 * std::sqrt(2.0) * c.B).epsilon(0.05));
    // the linear fit absorbs the (eps/t)^4 log t tail into the intercept
    CHECK(f.limit == Approx(6 * std::sqrt(2.0) * c.S4).epsilon(1e-4));
    CHECK_THROWS_AS(asymptotic_slope(InteractionKind::GRAD, 1.0, {10, 15}, spec()), InvalidParameter);
    CHECK_THROWS_AS(asymptotic_slope(InteractionKind::GRAD, 1.0, {5, 10}, spec()), InvalidParameter);
}

TEST_CASE("kind names round-trip") {
    for (auto k : {InteractionKind::U3V, InteractionKind::GRAD, InteractionKind::U2V2, InteractionKind::FCURVE})
        CHECK(parse_interaction_kind(to_string(k)) == k);
    CHECK_THROWS(parse_interaction_kind("bogus"));
}
