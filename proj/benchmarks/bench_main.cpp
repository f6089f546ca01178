#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "cyl/cnc.hpp"
#include "cyl/football.hpp"
#include "cyl/green.hpp"
#include "cyl/interaction.hpp"
#include "cyl/metric_field.hpp"
#include "cyl/path.hpp"
#include "cyl/quadrature.hpp"

using namespace cyl;

static void BM_CurvePoint(benchmark::State& state) {
    const double tau = static_cast<double>(state.range(0));
    const QuadratureSpec spec = interaction_default_spec();
    for (auto _ : state) benchmark::DoNotOptimize(curve_point(tau, spec));
}
BENCHMARK(BM_CurvePoint)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_EvaluateQuotient(benchmark::State& state) {
    const TestFunctionDescriptor d = state.range(0) == 0 ? double_bubble(2e-4, std::pow(2e-4, 0.6), 0.4)
                                                         : interpolated(2e-4, 0.5, 0.6, 0.7, 0.4);
    const QuadratureSpec spec = path_default_spec();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_quotient(d, spec));
    state.SetLabel(to_string(d.variant));
}
BENCHMARK(BM_EvaluateQuotient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_DirichletGreen(benchmark::State& state) {
    GreenProblem p{std::make_shared<FlatField>(), Vec4(0.2, 0.1, 0.0, 0.0), 1.0, {}};
    p.resolution.harmonic_cutoff = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet_green(p));
}
BENCHMARK(BM_DirichletGreen)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_VerifyCNC(benchmark::State& state) {
    auto field = FootballModel(0.4).lifted_field();
    const Vec4 x(0.3, 0.2, 0.0, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(verify_cnc(field, x, 1e-3, {}, CNCRoute::Chart));
}
BENCHMARK(BM_VerifyCNC)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
