#include "rydopt/noise.hpp"

#include <cmath>
#include <numbers>

#include "rydopt/rng.hpp"
#include "rydopt/signal.hpp"

namespace rydopt {

namespace {

// unbiased sample variance about the sample mean
double sample_std(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(n - 1));
}

void normalize_unit_variance(std::vector<double>& x) {
    const double s = sample_std(x);
    if (s > 0.0)
        for (double& v : x) v /= s;
}

std::vector<double> white_samples(rng::NormalStream& stream, std::size_t n) {
    std::vector<double> x(n);
    for (double& v : x) v = stream.normal();
    return x;
}

std::vector<double> pink_spectral(const std::vector<double>& white, double beta,
                                  double dt) {
    const std::size_t n = white.size();
    auto spec = signal::fft_real(white);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    spec[0] = 0.0; // 1/|w|^beta diverges at dc; dc offset is not 1/f noise
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t kk = (k <= n / 2) ? k : n - k; // hermitian axis
        const double omega = domega * static_cast<double>(kk);
        spec[k] *= std::pow(omega, -0.5 * beta);
    }
    auto out = signal::ifft(spec);
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = out[j].real();
    return x;
}

std::vector<double> pink_voss(rng::NormalStream& stream, std::size_t n) {
    // Voss-McCartney: rows update every 2^r samples; row count covers the grid
    int rows = 1;
    while ((std::size_t{1} << rows) < n) ++rows;
    std::vector<double> row(rows);
    for (double& v : row) v = stream.normal();
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) {
            // rows whose bit toggled at step j are resampled
            const std::size_t changed = j & (~j + 1); // lowest set bit
            for (int r = 0; r < rows; ++r)
                if (changed & (std::size_t{1} << r)) row[r] = stream.normal();
        }
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += row[r];
        x[j] = s / std::sqrt(static_cast<double>(rows));
    }
    return x;
}

std::vector<double> ou_samples(rng::NormalStream& stream, std::size_t n,
                               double dt, double tau_c) {
    // exact discrete OU recursion from a stationary initial draw
    const double decay = std::exp(-dt / tau_c);
    const double kick = std::sqrt(1.0 - decay * decay);
    std::vector<double> x(n);
    x[0] = stream.normal();
    for (std::size_t j = 1; j < n; ++j)
        x[j] = x[j - 1] * decay + kick * stream.normal();
    return x;
}

} // namespace

NoiseRealization generate(const NoiseSpec& spec, const TimeGrid& grid,
                          std::uint64_t realization_index) {
    spec.validate();
    grid.validate();
    if (grid.n_steps < 8)
        throw ConfigError("generate: n_steps < 8; spectral shaping meaningless");
    const std::uint64_t channel_tag =
        spec.channel == NoiseChannel::amplitude ? 0u : 1u;
    rng::NormalStream stream(rng::mix_seed(spec.seed, realization_index, channel_tag));
    const auto n = static_cast<std::size_t>(grid.n_steps);

    std::vector<double> x;
    switch (spec.kind) {
    case NoiseKind::white:
        x = white_samples(stream, n);
        break;
    case NoiseKind::pink:
        if (spec.pink_generator == PinkGenerator::voss) {
            x = pink_voss(stream, n);
        } else {
            x = pink_spectral(white_samples(stream, n), spec.beta, grid.dt());
        }
        break;
    case NoiseKind::ou:
        x = ou_samples(stream, n, grid.dt(), spec.tau_c);
        break;
    }
    normalize_unit_variance(x);
    return {grid, std::move(x)};
}

SampledField apply_noise(const SampledField& f,
                         const NoiseRealization* amplitude,
                         const NoiseRealization* phase,
                         double eps_amplitude, double eps_phase,
                         const SystemParams& p,
                         std::optional<double> analytic_tau) {
    if (amplitude && !(amplitude->grid == f.grid))
        throw UsageError("apply_noise: amplitude realization grid mismatch");
    if (phase && !(phase->grid == f.grid))
        throw UsageError("apply_noise: phase realization grid mismatch");

    const bool do_amp = amplitude != nullptr && eps_amplitude != 0.0;
    const bool do_phase = phase != nullptr && eps_phase != 0.0;
    if (!do_amp && !do_phase) return f;

    SampledField out = f;
    const std::size_t n = out.values.size();

    if (do_phase) {
        const double omega_sg = derived_frequencies(p).omega_sg;
        if (analytic_tau) {
            for (std::size_t j = 0; j < n; ++j) {
                const double t = f.grid.time(static_cast<std::int64_t>(j));
                out.values[j] = gaussian_envelope(t, *analytic_tau, p) *
                                std::cos(omega_sg * t + eps_phase * phase->samples[j]);
            }
        } else {
            const auto z = signal::analytic_signal(out.values);
            for (std::size_t j = 0; j < n; ++j) {
                const auto rot = std::polar(1.0, eps_phase * phase->samples[j]);
                out.values[j] = (z[j] * rot).real();
            }
        }
    }
    if (do_amp) {
        for (std::size_t j = 0; j < n; ++j)
            out.values[j] *= 1.0 + eps_amplitude * amplitude->samples[j];
    }
    return out;
}

std::string noise_kind_name(NoiseKind k) {
    switch (k) {
    case NoiseKind::white: return "white";
    case NoiseKind::pink: return "pink";
    case NoiseKind::ou: return "ou";
    }
    return "?";
}

std::string channel_name(NoiseChannel c) {
    return c == NoiseChannel::amplitude ? "amplitude" : "phase";
}

NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "white") return NoiseKind::white;
    if (s == "pink") return NoiseKind::pink;
    if (s == "ou") return NoiseKind::ou;
    throw ConfigError("unknown noise kind: " + s);
}

NoiseChannel parse_channel(const std::string& s) {
    if (s == "amplitude") return NoiseChannel::amplitude;
    if (s == "phase") return NoiseChannel::phase;
    throw ConfigError("unknown noise channel: " + s);
}

} // namespace rydopt
