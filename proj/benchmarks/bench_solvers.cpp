#include "basinlab/atlas.hpp"
#include "basinlab/azeotrope.hpp"
#include "basinlab/benchmark_systems.hpp"
#include "basinlab/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace basinlab;

namespace {

// Illustrative coefficients, as in data/illustrative_double_azeotrope.json.
SystemModel azeotrope() {
    AzeotropeParams p;
    p.pressure_kPa = 35.0;
    p.antoine[0] = {15.106273991879606, 3000.0, -40.0, AntoineForm::ln, PressureUnit::kPa, 0.0};
    p.antoine[1] = {6.99515, 1202.29, 226.254, AntoineForm::log10, PressureUnit::mmHg, -273.15};
    p.redlich_kister[0].constant = -0.64676666267476007;
    p.redlich_kister[1].constant = -0.03184797405584202;
    p.redlich_kister[2].constant = 0.44165620977862326;
    return make_azeotrope_system(p, default_azeotrope_domain(), {Vector{0.0923864, 309.45}, Vector{0.2552517, 309.57}});
}

void BM_Step(benchmark::State& state) {
    const auto method = kAllMethods[static_cast<std::size_t>(state.range(0))];
    const SystemModel sys = azeotrope();
    SolverSpec spec;
    spec.method = method;
    Evaluator<double> ev(sys, spec.jacobian_mode);
    const Vector x{0.095, 310.0};
    const Vector fx = ev.residual(x);
    for (auto _ : state) {
        DampingState<double> damping;
        benchmark::DoNotOptimize(step(x, fx, ev, spec, damping));
    }
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Step)->DenseRange(0, static_cast<int>(kAllMethods.size()) - 1);

void BM_Orbit(benchmark::State& state) {
    const auto method = kAllMethods[static_cast<std::size_t>(state.range(0))];
    const SystemModel sys = azeotrope();
    SolverSpec spec;
    spec.method = method;
    for (auto _ : state) benchmark::DoNotOptimize(run_orbit(Vector{0.1, 340.0}, spec, sys));
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Orbit)->DenseRange(0, static_cast<int>(kAllMethods.size()) - 1);

void BM_Sweep(benchmark::State& state) {
    const SystemModel sys = azeotrope();
    const int n = static_cast<int>(state.range(0));
    const GridSpec grid = GridSpec::over_domain(sys, n, n);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_basin(grid, SolverSpec{}, sys, 1));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Sweep)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CriticalCurve(benchmark::State& state) {
    const SystemModel sys = azeotrope();
    const GridSpec grid = GridSpec::over_domain(sys, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(extract_critical_curve(grid, sys, 3));
}
BENCHMARK(BM_CriticalCurve)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_CubicSweep(benchmark::State& state) {
    const SystemModel sys = make_cubic_roots_system<double>();
    const GridSpec grid{200, 200, {-2, 2}, {-2, 2}};
    for (auto _ : state) benchmark::DoNotOptimize(sweep_basin(grid, SolverSpec{}, sys, 1));
}
BENCHMARK(BM_CubicSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
