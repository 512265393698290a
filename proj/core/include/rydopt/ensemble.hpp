#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydopt/noise.hpp"
#include "rydopt/propagate.hpp"

namespace rydopt {

struct SweepConfig {
    std::vector<double> taus;      // pulse durations, a.u.
    NoiseSpec noise;               // template; epsilon overridden per point
    std::vector<double> alphas;    // noise amplitudes, ascending
    int n_realizations = 100;
    ModelKind model = ModelKind::three_level_numeric;
    enum class PulseSource { gaussian, from_file } pulse_source = PulseSource::gaussian;
    std::string pulse_file;        // used with from_file
    double span_tau = 4.0;         // grid = [-span_tau*tau, span_tau*tau]
    std::int64_t n_steps = 10000;
    PropagationOptions prop;
    int threads = 0;               // 0 = library default

    void validate() const {
        if (taus.empty()) throw ConfigError("SweepConfig: at least one tau required");
        if (n_realizations < 2)
            throw ConfigError("SweepConfig: n_realizations must be >= 2");
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (alphas[i] < 0.0)
                throw ConfigError("SweepConfig: alphas must be non-negative");
            if (i > 0 && alphas[i] < alphas[i - 1])
                throw ConfigError("SweepConfig: alphas must be ascending");
        }
        if (pulse_source == PulseSource::from_file && pulse_file.empty())
            throw ConfigError("SweepConfig: pulse_file required for from_file source");
    }
};

struct EnsembleResult {
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    std::vector<double> fidelities;
    // meta
    double tau = 0.0;
    double alpha = 0.0;
    NoiseKind kind = NoiseKind::white;
    NoiseChannel channel = NoiseChannel::amplitude;
    ModelKind model = ModelKind::three_level_numeric;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
};

struct QuadraticFit {
    double f0 = 0.0;
    double c_a = 0.0;
    double residual = 0.0;
};

// One (tau, alpha) point: n_realizations noisy trajectories, counter-seeded.
// Realizations run in parallel; aggregation order is fixed by index.
EnsembleResult run_ensemble(double tau, double alpha, const SweepConfig& cfg);

// Cartesian product over taus x alphas.
std::vector<EnsembleResult> sweep(const SweepConfig& cfg);

// least-squares fit of mean fidelity to F0 (1 - c_A alpha^2)
QuadraticFit fit_quadratic(const std::vector<double>& alphas,
                           const std::vector<double>& mean_fidelities);
QuadraticFit fit_quadratic(const std::vector<EnsembleResult>& results);

enum class DurationConvention { tau, fwhm, full_window };

// Eq.-(8)-style breakdown estimate 1/(Omega_peak T). Omega_peak is
// mu_d * max |envelope| from the analytic signal; the T convention is a
// parameter because the reference text leaves it unspecified.
double predict_breakdown(const SampledField& f, const SystemParams& p,
                         DurationConvention convention = DurationConvention::full_window);

void write_sweep_csv(const std::vector<EnsembleResult>& rows, const SystemParams& p,
                     const std::string& path);
void write_sweep_json(const std::vector<EnsembleResult>& rows, const SystemParams& p,
                      const std::string& path);
void write_realizations_csv(const std::vector<EnsembleResult>& rows,
                            const std::string& path);

} // namespace rydopt
