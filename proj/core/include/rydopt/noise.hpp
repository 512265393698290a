#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydopt/pulse.hpp"

namespace rydopt {

enum class NoiseKind { white, pink, ou };
enum class NoiseChannel { amplitude, phase };
enum class PinkGenerator { spectral, voss }; // Voss-McCartney selectable

struct NoiseSpec {
    NoiseKind kind = NoiseKind::white;
    NoiseChannel channel = NoiseChannel::amplitude;
    double epsilon = 0.0;     // noise amplitude (the alpha of the figures)
    double beta = 1.0;        // pink exponent
    double tau_c = 0.0;       // OU correlation time, a.u.
    std::uint64_t seed = 0;   // master seed
    PinkGenerator pink_generator = PinkGenerator::spectral;

    void validate() const {
        if (epsilon < 0.0) throw ConfigError("NoiseSpec: epsilon must be >= 0");
        if (kind == NoiseKind::ou && !(tau_c > 0.0))
            throw ConfigError("NoiseSpec: tau_c must be positive for OU noise");
        if (kind == NoiseKind::pink && (beta < 0.5 || beta > 1.5))
            throw ConfigError("NoiseSpec: beta must lie in [0.5, 1.5]");
    }
};

struct NoiseRealization {
    TimeGrid grid;
    std::vector<double> samples; // unit sample variance after normalization
};

// Deterministic given (spec.seed, realization_index, channel). White and
// colored realizations at the same index share the underlying Gaussian
// stream, which makes cross-spectrum comparisons common-random-number paired.
NoiseRealization generate(const NoiseSpec& spec, const TimeGrid& grid,
                          std::uint64_t realization_index);

// Eq.-(4)-style application. The amplitude channel multiplies samples by
// (1 + eps_A eta_A). The phase channel re-synthesizes the carrier: with
// analytic_tau set, the known Gaussian envelope is used; otherwise the
// envelope/phase come from the analytic signal (Hilbert) of the field.
// Both eps = 0 short-circuits to a bitwise copy.
SampledField apply_noise(const SampledField& f,
                         const NoiseRealization* amplitude,
                         const NoiseRealization* phase,
                         double eps_amplitude, double eps_phase,
                         const SystemParams& p,
                         std::optional<double> analytic_tau = std::nullopt);

std::string noise_kind_name(NoiseKind k);
std::string channel_name(NoiseChannel c);
NoiseKind parse_noise_kind(const std::string& s);
NoiseChannel parse_channel(const std::string& s);

} // namespace rydopt
