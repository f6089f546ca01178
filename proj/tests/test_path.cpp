#include <cmath>
#include <limits>

#include "cyl/constants.hpp"
#include "cyl/football.hpp"
#include "cyl/interaction.hpp"
#include "cyl/metric_field.hpp"
#include "cyl/path.hpp"
#include "cyl/types.hpp"
#include "support.hpp"

using namespace cyl;
using cyltest::Approx;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double six_s4() { return 6.0 * constants().S4; }
double ys() { return six_s4() / std::sqrt(2.0); }

QuadratureSpec fast_spec() {
    QuadratureSpec s = path_default_spec();
    s.rel_tol = 1e-9;
    s.abs_tol = 1e-11;
    return s;
}

}  // namespace

TEST_CASE("single bubble at a tip sits just above the orbifold level") {
    const QuotientResult q = evaluate_quotient(single_bubble(1e-2, 0.4), path_default_spec());
    CHECK(q.converged);
    CHECK(q.Q > ys());
    CHECK(q.Q < ys() + 0.5);
    CHECK(q.error < 1e-6);

    const QuotientResult smaller = evaluate_quotient(single_bubble(1e-3, 0.4), path_default_spec());
    CHECK(smaller.Q - ys() < q.Q - ys());
}

TEST_CASE("flat cone chart route reproduces the Euclidean interaction curve") {
    auto flat = std::make_shared<FlatField>();
    const double eps = 0.1;

    const QuotientResult single = evaluate_quotient_chart(single_bubble(eps, kInf), flat, path_default_spec());
    CHECK(single.Q == Approx(ys()).epsilon(1e-9));

    for (double tau : {0.5, 2.0, 8.0}) {
        CAPTURE(tau);
        const QuotientResult q = evaluate_quotient_chart(double_bubble(eps, tau * eps, kInf), flat, path_default_spec());
        const CurvePoint c = curve_point(tau, interaction_default_spec());
        const double expected = c.f / std::sqrt(2.0);
        CHECK(std::abs(q.Q - expected) < 10.0 * (q.error + c.f_err) + 1e-9 * expected);
    }
}

TEST_CASE("the S^4 route and the tip chart route agree on the football") {
    auto round = FootballModel(0.4).lifted_field();
    for (auto d : {single_bubble(2e-2, 0.4), double_bubble(2e-2, 0.05, 0.4), double_bubble(1e-2, 0.08, 0.4, -1)}) {
        CAPTURE(to_string(d.variant));
        CAPTURE(d.t);
        const QuotientResult a = evaluate_quotient(d, path_default_spec());
        const QuotientResult b = evaluate_quotient_chart(d, round, path_default_spec());
        CHECK(a.Q == Approx(b.Q).epsilon(1e-8));
        CHECK(a.numerator == Approx(b.numerator).epsilon(1e-8));
        CHECK(a.denominator == Approx(b.denominator).epsilon(1e-8));
    }
}

TEST_CASE("quotient is invariant under scaling of the test function") {
    const QuadratureSpec spec = fast_spec();
    for (auto d : {double_bubble(1e-2, 0.03, 0.4), glued_bubble(2e-4, 1.2, 0.05, 0.4),
                   interpolated(2e-4, 0.3, 0.6, 0.7, 0.4)}) {
        CAPTURE(to_string(d.variant));
        const QuotientResult base = evaluate_quotient(d, spec);
        for (double k : {1e-3, 0.5, 7.0}) {
            auto scaled = d;
            scaled.amplitude = k;
            const QuotientResult q = evaluate_quotient(scaled, spec);
            CHECK(std::abs(q.Q - base.Q) <= q.error + base.error + 1e-12 * base.Q);
            // Below the absolute tolerance the adaptive refinement differs.
            if (k >= 0.5) {
                CHECK(q.Q == Approx(base.Q).epsilon(1e-12));
                CHECK(q.denominator == Approx(k * k * k * k * base.denominator).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("glued bubble at the meridian midpoint stays below the sphere level") {
    const QuotientResult q = evaluate_quotient(glued_bubble(2e-4, pi / 2, 0.2, 0.4), path_default_spec());
    CHECK(q.converged);
    CHECK(q.Q + 3.0 * q.error < six_s4());
    CHECK(q.Q > ys());
}

TEST_CASE("matching constant") {
    const double c4 = constants().c4;
    SUBCASE("closed form") {
        for (double A : {0.0, 0.3, 2.5}) {
            for (double eps : {1e-2, 1e-3}) {
                const double tau = 0.1;
                const NuMatch m = nu_matching(eps, tau, A);
                const double inverse = c4 * eps * tau * tau / ((eps * eps + tau * tau) * (1.0 + A * tau * tau));
                CHECK(m.inverse == Approx(inverse).epsilon(1e-13));
                CHECK(m.nu * m.inverse == Approx(1.0).epsilon(1e-15));
            }
        }
    }
    SUBCASE("expansion gap closes as t shrinks") {
        const double A = 25.0;
        double prev = 1.0;
        for (double t : {0.1, 0.03, 0.01}) {
            const double tau = std::pow(t, 7.0 / 6.0);
            const double gap = nu_matching(std::pow(t, 5.0 / 3.0), tau, A).gap;
            CAPTURE(t);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev < 1e-2);
    }
    SUBCASE("small eps limit") {
        const double tau = 0.2, A = 1.7;
        const double limit = 1.0 - tau * tau * A;
        double prev = kInf;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const NuMatch m = nu_matching(eps, tau, A);
            const double dev = std::abs(1.0 / (m.nu * c4 * eps) - 1.0 / (1.0 + tau * tau * A));
            CHECK(dev < prev);
            prev = dev;
        }
        CHECK(1.0 / (nu_matching(1e-5, tau, A).nu * c4 * 1e-5) == Approx(limit).epsilon(tau * tau * tau * tau * A * A));
    }
    CHECK_THROWS_AS(nu_matching(0.1, 0.05, 0.0), InvalidParameter);
}

TEST_CASE("boundary flux of the bubble") {
    const double c4 = constants().c4;
    for (double eps : {1e-2, 1e-3}) {
        for (double tau : {0.05, 0.2}) {
            const BoundaryFlux f = boundary_flux(eps, tau, path_default_spec());
            CHECK(f.closed_form < 0.0);
            CHECK(f.quadrature == Approx(f.closed_form).epsilon(1e-8));
            CHECK(f.quadrature_error < 1e-8 * std::abs(f.closed_form));
        }
    }
    double prev = kInf;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double tau = 0.1;
        const double ratio = boundary_flux(eps, tau, path_default_spec()).closed_form /
                             (-4.0 * pi * pi * c4 * c4 * eps * eps / (tau * tau));
        const double dev = std::abs(ratio - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("path profile stays strictly below the sphere level") {
    PathOptions opt;
    opt.points = 21;
    const PathProfile p = build_path(opt);
    REQUIRE(p.values.size() == 21);
    CHECK(p.mu.front() == 0.0);
    CHECK(p.mu.back() == 5.0);
    CHECK(std::abs(p.values.front().Q - ys()) < 0.5);
    CHECK(std::abs(p.values.back().Q - ys()) < 0.5);
    CHECK(p.max_Q + 3.0 * p.max_error < six_s4());
    CHECK(p.max_Q > ys());
    for (const QuotientResult& q : p.values) CHECK(q.converged);
    // The tips are exchanged by reflecting the path.
    const int n = static_cast<int>(p.values.size());
    for (int i = 0; i < n; ++i) {
        CAPTURE(p.mu[i]);
        CHECK(p.values[i].Q == Approx(p.values[n - 1 - i].Q).epsilon(1e-8));
    }
    for (double gap : p.transition_gaps) CHECK(gap < 1e-10);
}

TEST_CASE("path is continuous in the parameter") {
    PathOptions opt;
    const QuadratureSpec spec = fast_spec();
    for (double mu : {0.5, 1.5, 2.5, 3.5}) {
        CAPTURE(mu);
        double prev = kInf;
        for (double h : {1e-5, 1e-6, 1e-7}) {
            const double d = l4_distance(path_descriptor(mu, opt), path_descriptor(mu + h, opt), spec);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 1e-3);
    }
    for (double lambda : {0.2, 0.7}) {
        const double q0 = evaluate_quotient(interpolated(2e-4, lambda, 0.6, 0.7, 0.4), spec).Q;
        const double q1 = evaluate_quotient(interpolated(2e-4, lambda + 1e-4, 0.6, 0.7, 0.4), spec).Q;
        CHECK(std::abs(q1 - q0) < 1e-3);
    }
}

TEST_CASE("expansion coefficient on the double and interpolated legs") {
    const std::vector<double> eps{4e-4, 2e-4, 1e-4, 5e-5};
    const double alpha = 0.6, omega = 0.7;
    const double A = constants().A;
    for (FitLeg leg : {FitLeg::Double, FitLeg::Interp}) {
        CAPTURE(to_string(leg));
        const ExpansionFit fit = fit_expansion_A(leg, eps, alpha, omega, 0.4, 0.5, fast_spec());
        CHECK(std::abs(fit.A_hat - A) < 0.1 * A);
        CHECK(std::abs(fit.exponent - 2.0 * (1.0 - alpha)) < 0.08);
        for (double q : fit.Q) CHECK(q < six_s4());
    }
    CHECK_THROWS_AS(fit_expansion_A(FitLeg::Double, {1e-4}, alpha, omega, 0.4, 0.5, fast_spec()), InvalidParameter);
}

TEST_CASE("descriptor validation") {
    CHECK(exponents_admissible(0.6, 0.7));
    CHECK_FALSE(exponents_admissible(0.7, 0.6));
    CHECK_FALSE(exponents_admissible(0.4, 0.7));
    CHECK_FALSE(exponents_admissible(0.6, 0.95));
    CHECK_FALSE(exponents_admissible(0.6, 1.0));

    CHECK_THROWS_AS(single_bubble(0.0, 0.4), InvalidParameter);
    CHECK_THROWS_AS(single_bubble(1e-2, 0.4, 2), InvalidParameter);
    CHECK_THROWS_AS(double_bubble(1e-2, 0.2, 0.4), InvalidParameter);
    CHECK_THROWS_AS(glued_bubble(1e-3, 0.0, 0.05, 0.4), InvalidParameter);
    CHECK_THROWS_AS(glued_bubble(1e-3, 1.0, 5e-4, 0.4), InvalidParameter);
    CHECK_THROWS_AS(interpolated(1e-3, 1.5, 0.6, 0.7, 0.4), InvalidParameter);
    CHECK_THROWS_AS(interpolated(1e-3, 0.5, 0.7, 0.6, 0.4), InvalidParameter);
    CHECK_THROWS_AS(evaluate_quotient_chart(glued_bubble(1e-3, 1.0, 0.05, 0.4), FootballModel(0.4).lifted_field(),
                                            path_default_spec()),
                    InvalidParameter);
    CHECK_THROWS_AS(evaluate_quotient_chart(single_bubble(1e-2, kInf), FootballModel(0.4).lifted_field(),
                                            path_default_spec()),
                    InvalidParameter);
    auto bad = single_bubble(1e-2, 0.4);
    bad.amplitude = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    PathOptions opt;
    CHECK_THROWS_AS(path_descriptor(5.5, opt), InvalidParameter);
    opt.points = 3;
    CHECK_THROWS_AS(build_path(opt), InvalidParameter);
}

TEST_CASE("names round-trip") {
    for (auto v : {TestVariant::Single, TestVariant::Double, TestVariant::Glued, TestVariant::Interp})
        CHECK(parse_test_variant(to_string(v)) == v);
    for (auto l : {FitLeg::Double, FitLeg::Glued, FitLeg::Interp}) CHECK(parse_fit_leg(to_string(l)) == l);
    CHECK_THROWS_AS(parse_test_variant("triple"), InvalidParameter);
    CHECK_THROWS_AS(parse_fit_leg("single"), InvalidParameter);
}
