#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rydopt/system.hpp"

namespace rydopt {

struct TimeGrid {
    double t0 = 0.0;
    double tf = 0.0;
    std::int64_t n_steps = 0; // number of grid points

    double dt() const { return (tf - t0) / static_cast<double>(n_steps - 1); }
    double time(std::int64_t j) const { return t0 + static_cast<double>(j) * dt(); }
    double span() const { return tf - t0; }

    void validate() const {
        if (n_steps < 2) throw ConfigError("TimeGrid: n_steps must be >= 2");
        if (!(tf > t0)) throw ConfigError("TimeGrid: tf must exceed t0");
    }

    bool operator==(const TimeGrid&) const = default;

    // centered grid [-span_tau*tau, +span_tau*tau]
    static TimeGrid centered(double tau, double span_tau, std::int64_t n_steps) {
        return TimeGrid{-span_tau * tau, span_tau * tau, n_steps};
    }
};

struct SampledField {
    TimeGrid grid;
    std::vector<double> values;

    void validate() const;
};

struct PulseAreas {
    std::complex<double> theta_sg;
    std::complex<double> theta_es;
};

struct SpectrumPoint {
    double freq = 0.0; // angular frequency, a.u.
    std::complex<double> amplitude;
};

// Eq.-(7)-style Gaussian with the pulse area theta_sg(t_f) = pi/2 built in.
// Emits a warning line to stderr if the grid does not cover [-4 tau, 4 tau].
SampledField gaussian_pulse(const TimeGrid& grid, double tau, const SystemParams& p);

// analytic Gaussian envelope of the baseline pulse (no carrier)
double gaussian_envelope(double t, double tau, const SystemParams& p);

PulseAreas pulse_areas(const SampledField& f, const SystemParams& p);

// running areas theta(t_j) by cumulative trapezoid; index j matches the grid
void cumulative_areas(const SampledField& f, const SystemParams& p,
                      std::vector<std::complex<double>>& theta_sg,
                      std::vector<std::complex<double>>& theta_es);

double fluence(const SampledField& f);
double zero_area(const SampledField& f);

// one-sided DFT (frequencies 0..Nyquist), amplitude = dt * DFT coefficient
std::vector<SpectrumPoint> spectrum(const SampledField& f);

// FWHM of |amplitude| around the dominant positive-frequency peak (diagnostic)
double spectral_fwhm(const std::vector<SpectrumPoint>& spec);

// bandwidth convention used in sweep tables: domega = 1/tau
inline double bandwidth(double tau) { return 1.0 / tau; }

void write_field_csv(const SampledField& f, const std::string& path);
SampledField read_field_csv(const std::string& path);

} // namespace rydopt
