#include <benchmark/benchmark.h>

#include "rydopt/propagate.hpp"

using namespace rydopt;

namespace {

struct Setup {
    SystemParams p = SystemParams::paper();
    SampledField field;
    Setup(double tau_fs, std::int64_t n) {
        const double tau = units::femtosecond_to_au(tau_fs);
        field = gaussian_pulse(TimeGrid::centered(tau, 4.0, n), tau, p);
    }
};

} // namespace

static void PropagateMagnus(benchmark::State& state) {
    Setup s(100.0, state.range(0));
    PropagationOptions opts;
    opts.substeps = static_cast<int>(state.range(1));
    Propagator3LN prop(s.field.grid, s.p, opts);
    for (auto _ : state) {
        auto psi = prop.final_state(s.field, ground_state());
        benchmark::DoNotOptimize(psi);
    }
    state.counters["steps_per_s"] = benchmark::Counter(
        static_cast<double>(state.iterations() * (state.range(0) - 1)),
        benchmark::Counter::kIsRate);
}
BENCHMARK(PropagateMagnus)->Args({10000, 8})->Args({10000, 4})->Args({10000, 2});

static void PropagateMidpoint(benchmark::State& state) {
    Setup s(100.0, state.range(0));
    PropagationOptions opts;
    opts.stepper = Stepper::midpoint;
    Propagator3LN prop(s.field.grid, s.p, opts);
    for (auto _ : state) {
        auto psi = prop.final_state(s.field, ground_state());
        benchmark::DoNotOptimize(psi);
    }
    state.counters["steps_per_s"] = benchmark::Counter(
        static_cast<double>(state.iterations() * (state.range(0) - 1)),
        benchmark::Counter::kIsRate);
}
BENCHMARK(PropagateMidpoint)->Arg(10000);

static void PropagateMagnusHistory(benchmark::State& state) {
    Setup s(100.0, 10000);
    Propagator3LN prop(s.field.grid, s.p, {});
    PopulationHistory hist;
    for (auto _ : state) {
        auto psi = prop.final_state(s.field, ground_state(), hist);
        benchmark::DoNotOptimize(psi);
    }
}
BENCHMARK(PropagateMagnusHistory);
