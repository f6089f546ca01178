#include "support.hpp"

#include <cmath>
#include <random>

#include "cyl/cone.hpp"
#include "cyl/constants.hpp"
#include "cyl/football.hpp"
#include "cyl/green.hpp"

using namespace cyl;
using cyltest::Approx;

namespace {

// Mass of the lifted pair in the flat ball of radius d from Kelvin images.
double image_mass(double t, double d) {
    const double d2 = d * d, t2 = t * t;
    return 1 / (4 * t2) - d2 / ((d2 - t2) * (d2 - t2)) - d2 / ((d2 + t2) * (d2 + t2));
}

// Smooth bump exp(-|y-c|^2/(2s^2)) (1 - |y|^2/R^2)^3, with its jet.
ScalarJetFn bump(const Vec4& c, double s, double R) {
    return [=](const Vec4& y) {
        Jet2 out;
        const Vec4 d = y - c;
        const double e = std::exp(-d.squaredNorm() / (2 * s * s));
        const double b = 1 - y.squaredNorm() / (R * R);
        if (b <= 0) return out;
        const double b3 = b * b * b;
        const Vec4 ge = -e * d / (s * s), gb = -2 * y / (R * R);
        const Mat4 He = e * (d * d.transpose() / std::pow(s, 4) - Mat4::Identity() / (s * s));
        const Mat4 Hb = -2 * Mat4::Identity() / (R * R);
        out.v = e * b3;
        out.g = ge * b3 + 3 * e * b * b * gb;
        out.H = He * b3 + 3 * b * b * (ge * gb.transpose() + gb * ge.transpose()) +
                e * (6 * b * gb * gb.transpose() + 3 * b * b * Hb);
        return out;
    };
}

// Test-side product rule for int G (-6 Lap psi) over the flat unit ball, polar about x.
double flat_weak_lhs(const GreenFunction& G, const Vec4& x, const ScalarJetFn& psi) {
    const auto& S = sphere3_rule(16);
    const auto& g = gauss_legendre(16);
    const int pieces = 8;
    double sum = 0;
    for (std::size_t k = 0; k < S.dirs.size(); ++k) {
        const Vec4& w = S.dirs[k];
        const double dw = x.dot(w);
        const double rmax = -dw + std::sqrt(dw * dw - x.squaredNorm() + 1.0);
        double acc = 0;
        for (int p = 0; p < pieces; ++p) {
            const double a = rmax * p / pieces, b = rmax * (p + 1) / pieces;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double r = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
                const Vec4 y = x + r * w;
                acc += 0.5 * (b - a) * g.w[i] * G(y) * (-conformal_a * psi(y).H.trace()) * r * r * r;
            }
        }
        sum += S.w[k] * acc;
    }
    return sum;
}

}  // namespace

TEST_CASE("flat centered ball") {
    auto flat = std::make_shared<FlatField>();
    for (double d : {1.0, 0.5}) {
        const auto G = solve_dirichlet_green(GreenProblem{flat, Vec4::Zero(), d, {}});
        for (const Vec4& z : sphere_samples(6))
            for (double r : {0.1, 0.4, 0.9}) CHECK(G(r * d * z) == Approx(1 / (r * r * d * d) - 1 / (d * d)).epsilon(1e-10));
        MassOptions mo;
        mo.eps0 = d / 10;
        const auto m = extract_mass([&](const Vec4& y) { return G(y); }, flat, Vec4::Zero(), mo);
        CHECK(std::abs(m.A + 1 / (d * d)) < 1e-6);
        CHECK(m.error < 1e-6);
    }
}

TEST_CASE("off-center pole: boundary trace, positivity and weak form") {
    auto flat = std::make_shared<FlatField>();
    const Vec4 x(0.2, 0.1, 0, 0);
    const auto G = solve_dirichlet_green(GreenProblem{flat, x, 1.0, {}});
    for (const Vec4& z : sphere_samples(10)) {
        CHECK(std::abs(G(z)) < 1e-9);
        for (double r : {0.2, 0.6, 0.95}) CHECK(G(r * z) > 0);
    }
    // Kelvin image oracle
    const Vec4 xs = x / x.squaredNorm();
    for (const Vec4& z : sphere_samples(6)) {
        const Vec4 y = 0.5 * z;
        const double exact = 1 / (y - x).squaredNorm() - 1 / (x.squaredNorm() * (y - xs).squaredNorm());
        CHECK(G(y) == Approx(exact).epsilon(1e-9));
    }

    std::mt19937 rng(30);
    std::uniform_real_distribution<double> u(-0.4, 0.4), w(0.15, 0.35);
    double worst = 0;
    for (int k = 0; k < 30; ++k) {
        const Vec4 c(u(rng), u(rng), u(rng), u(rng));
        const auto psi = bump(c, w(rng), 1.0);
        const double rhs = 4 * conformal_a * pi * pi * psi(x).v;
        worst = std::max(worst, std::abs(flat_weak_lhs(G, x, psi) - rhs) / std::abs(rhs));
    }
    CHECK(worst < 1e-6);

    QuadratureSpec qs;
    qs.rel_tol = 1e-6;
    const auto wf = weak_form_check([&](const Vec4& y) { return G(y); }, *flat, x, 1.0,
                                    bump(Vec4(0.1, 0, 0.05, 0), 0.3, 1.0), qs);
    CHECK(wf.defect() < 1e-6);
}

TEST_CASE("round lift: equivariance and weak form") {
    auto S = FootballModel(0.4).lifted_field();
    const Vec4 x(0.05, 0.02, 0, 0);
    const auto gp = std::make_shared<GreenFunction>(solve_dirichlet_green(GreenProblem{S, x, 0.8, {}}));
    const auto gm = std::make_shared<GreenFunction>(solve_dirichlet_green(GreenProblem{S, -x, 0.8, {}}));
    for (const Vec4& z : sphere_samples(8))
        for (double r : {0.2, 0.5}) CHECK((*gp)(r * z) == Approx((*gm)(-r * z)).epsilon(1e-9));

    QuadratureSpec qs;
    qs.rel_tol = 1e-9;
    const auto wf = weak_form_check([&](const Vec4& y) { return (*gp)(y); }, *S, x, 0.8,
                                    bump(Vec4(0.1, 0, 0.05, 0), 0.25, 0.8), qs);
    CHECK(wf.defect() < 1e-6);

    const auto zero = assemble_equivariant(gp, gm, BoundaryDatum{});
    const auto samples = sphere_samples(10);
    std::vector<Vec4> pts;
    for (const Vec4& z : samples) pts.push_back(0.4 * z);
    CHECK(zero.symmetry_defect(pts) < 1e-9);
    for (const Vec4& y : pts) CHECK(zero(y) == Approx((*gp)(y) + (*gm)(y)).epsilon(1e-13));

    BoundaryDatum global;
    global.kind = DatumKind::Global;
    const auto q = assemble_equivariant(gp, gm, global);
    REQUIRE(q.has_harmonic);
    for (const Vec4& y : pts) CHECK(q.harmonic(y) == Approx(q.harmonic(-y)).epsilon(1e-9));
    CHECK(q.symmetry_defect(pts) < 1e-9);
    // the glued function is the global quotient Green function
    for (const Vec4& y : pts) {
        const Vec5 X = FootballModel::to_sphere(x, 1), Y = FootballModel::to_sphere(y, 1);
        CHECK(q(y) == Approx(FootballModel::quotient_green(X, Y)).epsilon(1e-8));
    }
}

TEST_CASE("mass divergence on the flat cone") {
    auto flat = std::make_shared<FlatField>();
    SweepOptions opt;
    const auto sweep = mass_divergence_sweep(flat, {0.2, 0.1, 0.05, 0.02}, 1.0, opt);
    for (const auto& e : sweep) {
        CHECK(e.A == Approx(image_mass(e.t, 1.0)).epsilon(1e-8));
        CHECK(std::abs(e.A - image_mass(e.t, 1.0)) <= e.A_error + 1e-9 * std::abs(e.A));
    }
    CHECK(sweep.back().product == Approx(1.0).epsilon(0.05));
    // 1 - A 4t^2 = 8 t^2 + O(t^4): the correction is second order
    for (std::size_t i = 1; i < sweep.size(); ++i)
        CHECK(std::abs(1 - sweep[i].product) < std::abs(1 - sweep[i - 1].product));
    CHECK((1 - sweep[3].product) / (sweep[3].t * sweep[3].t) == Approx(8.0).epsilon(0.01));

    const auto half = mass_divergence_sweep(flat, {0.05, 0.02}, 0.5, opt);
    const double d1 = sweep[2].A - half[0].A, d2 = sweep[3].A - half[1].A;
    CHECK(std::abs(d1 - d2) < 0.1 * std::abs(d1));

    SweepOptions fine = opt;
    fine.resolution.harmonic_cutoff = 64;
    const auto e64 = green_expansion(flat, 0.1, 1.0, fine);
    CHECK(std::abs(e64.A - sweep[1].A) <= sweep[1].A_error + 1e-9);
}

TEST_CASE("mass divergence on the football lift") {
    auto S = FootballModel(0.4).lifted_field();
    SweepOptions opt;
    opt.datum.kind = DatumKind::Global;
    opt.epsilon = 1e-3;
    for (const auto& e : mass_divergence_sweep(S, {0.1, 0.05, 0.02}, 0.8, opt)) {
        const double exact = 1 / (4 * std::sin(e.t) * std::sin(e.t));
        CHECK(e.A == Approx(exact).epsilon(1e-8));
        CHECK(FootballModel::mass(e.t) == Approx(exact).epsilon(1e-14));
        CHECK(e.nu == Approx(continuity_nu(1e-3, std::pow(e.t, opt.b), e.A)).epsilon(1e-14));
        if (e.t <= 0.02) CHECK(e.product == Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("parametrix residual") {
    auto flat = std::make_shared<FlatField>();
    const auto f = parametrix_residual(flat, Vec4(0.1, 0, 0, 0), {0.01, 0.03});
    // zero up to Jacobi-field rounding amplified by 2a/r^3
    for (const auto& s : f.samples) CHECK(std::abs(s.value) * std::pow(s.r, 3) < 1e-12);

    auto S = FootballModel(0.4).lifted_field();
    // without the conformal factor the residual stays bounded near -4/5
    const auto raw = parametrix_residual(S, Vec4(0.1, 0, 0, 0), {0.005, 0.01}, false);
    for (const auto& s : raw.samples) CHECK(s.value == Approx(-0.8).epsilon(0.01));

    const auto fit = parametrix_scaling(S, {0.4, 0.2, 0.1}, 2);
    CHECK(fit.exponent >= -2.3);
    CHECK(fit.exponent <= -1.7);
    for (std::size_t i = 0; i < fit.t.size(); ++i) CHECK(fit.sup[i] <= 1.05 * fit.constant * std::pow(fit.t[i], -2));
    const auto decade = parametrix_scaling(S, {0.2, 0.1, 0.05, 0.02}, 2);
    CHECK(decade.exponent == Approx(-2.0).epsilon(0.15));
}

TEST_CASE("matching constant") {
    const double c4 = constants().c4;
    const double eps = 1e-3, tau = 0.05, A = 25;
    const double nu = continuity_nu(eps, tau, A);
    CHECK(c4 / eps / (1 + tau * tau / (eps * eps)) == Approx((1 / (tau * tau) + A) / nu).epsilon(1e-14));
}

TEST_CASE("problem validation") {
    auto flat = std::make_shared<FlatField>();
    CHECK_THROWS_AS(GreenProblem({flat, Vec4::Zero(), -1.0, {}}).validate(), InvalidParameter);
    CHECK_THROWS_AS(GreenProblem({flat, Vec4(2, 0, 0, 0), 1.0, {}}).validate(), InvalidParameter);
    CHECK_THROWS_AS(solve_dirichlet_green(GreenProblem{isotropic_cone_example(0.5), Vec4::Zero(), 0.4, {}}),
                    InvalidParameter);
    CHECK(to_string(BoundaryDatum::parse("global").kind) == "global");
    CHECK_THROWS(BoundaryDatum::parse("nonsense"));
}
