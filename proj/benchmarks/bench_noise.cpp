#include <benchmark/benchmark.h>

#include "rydopt/noise.hpp"

using namespace rydopt;

static void GenerateNoise(benchmark::State& state, NoiseKind kind) {
    const double tau = units::femtosecond_to_au(2000.0);
    const TimeGrid grid = TimeGrid::centered(tau, 4.0, state.range(0));
    NoiseSpec spec;
    spec.kind = kind;
    spec.epsilon = 0.1;
    spec.tau_c = units::femtosecond_to_au(100.0);
    spec.seed = 7;
    std::uint64_t idx = 0;
    for (auto _ : state) {
        auto r = generate(spec, grid, idx++);
        benchmark::DoNotOptimize(r.samples.data());
    }
}

static void GenerateWhite(benchmark::State& s) { GenerateNoise(s, NoiseKind::white); }
static void GeneratePink(benchmark::State& s) { GenerateNoise(s, NoiseKind::pink); }
static void GenerateOu(benchmark::State& s) { GenerateNoise(s, NoiseKind::ou); }

BENCHMARK(GenerateWhite)->Arg(10000)->Arg(163840);
BENCHMARK(GeneratePink)->Arg(10000)->Arg(163840);
BENCHMARK(GenerateOu)->Arg(10000)->Arg(163840);
