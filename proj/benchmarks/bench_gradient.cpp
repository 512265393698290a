#include <benchmark/benchmark.h>

#include "rydopt/dmorph.hpp"

using namespace rydopt;

static void ObjectiveGradient(benchmark::State& state) {
    const SystemParams p = SystemParams::paper();
    const double tau = units::femtosecond_to_au(250.0);
    const auto field =
        gaussian_pulse(TimeGrid::centered(tau, 4.0, state.range(0)), tau, p);
    for (auto _ : state) {
        auto g = objective_gradient(field, p, ground_state(), bell_state());
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(ObjectiveGradient)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
