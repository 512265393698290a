#include "rydopt/pulse.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "rydopt/csv.hpp"
#include "rydopt/signal.hpp"

namespace rydopt {

using std::complex;

void SampledField::validate() const {
    grid.validate();
    if (static_cast<std::int64_t>(values.size()) != grid.n_steps)
        throw ConfigError("SampledField: values length does not match grid");
    for (double v : values)
        if (!std::isfinite(v))
            throw PropagationError("SampledField: non-finite sample");
}

double gaussian_envelope(double t, double tau, const SystemParams& p) {
    const double mu_d = std::sqrt(2.0) * p.mu;
    return std::sqrt(std::numbers::pi / 2.0) / (mu_d * tau) *
           std::exp(-t * t / (2.0 * tau * tau));
}

SampledField gaussian_pulse(const TimeGrid& grid, double tau, const SystemParams& p) {
    grid.validate();
    if (!(tau > 0.0)) throw ConfigError("gaussian_pulse: tau must be positive");
    if (-grid.t0 < 4.0 * tau || grid.tf < 4.0 * tau)
        std::cerr << "warning: grid narrower than [-4 tau, 4 tau]; pulse area truncated\n";
    const double omega_sg = derived_frequencies(p).omega_sg;
    SampledField f{grid, std::vector<double>(grid.n_steps)};
    for (std::int64_t j = 0; j < grid.n_steps; ++j) {
        const double t = grid.time(j);
        f.values[j] = gaussian_envelope(t, tau, p) * std::cos(omega_sg * t);
    }
    return f;
}

PulseAreas pulse_areas(const SampledField& f, const SystemParams& p) {
    const auto d = derived_frequencies(p);
    const double dt = f.grid.dt();
    const std::int64_t n = f.grid.n_steps;
    complex<double> sg = 0.0, es = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        const double t = f.grid.time(j);
        const double v = w * f.values[j];
        sg += v * std::polar(1.0, d.omega_sg * t);
        es += v * std::polar(1.0, d.omega_es * t);
    }
    return {d.mu_d * dt * sg, d.mu_d * dt * es};
}

void cumulative_areas(const SampledField& f, const SystemParams& p,
                      std::vector<complex<double>>& theta_sg,
                      std::vector<complex<double>>& theta_es) {
    const auto d = derived_frequencies(p);
    const double dt = f.grid.dt();
    const std::int64_t n = f.grid.n_steps;
    theta_sg.assign(n, 0.0);
    theta_es.assign(n, 0.0);
    complex<double> prev_sg = f.values[0] * std::polar(1.0, d.omega_sg * f.grid.time(0));
    complex<double> prev_es = f.values[0] * std::polar(1.0, d.omega_es * f.grid.time(0));
    complex<double> acc_sg = 0.0, acc_es = 0.0;
    for (std::int64_t j = 1; j < n; ++j) {
        const double t = f.grid.time(j);
        const complex<double> cur_sg = f.values[j] * std::polar(1.0, d.omega_sg * t);
        const complex<double> cur_es = f.values[j] * std::polar(1.0, d.omega_es * t);
        acc_sg += 0.5 * dt * (prev_sg + cur_sg);
        acc_es += 0.5 * dt * (prev_es + cur_es);
        theta_sg[j] = d.mu_d * acc_sg;
        theta_es[j] = d.mu_d * acc_es;
        prev_sg = cur_sg;
        prev_es = cur_es;
    }
}

double fluence(const SampledField& f) {
    const double dt = f.grid.dt();
    const std::int64_t n = f.grid.n_steps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * f.values[j] * f.values[j];
    }
    return acc * dt;
}

double zero_area(const SampledField& f) {
    const double dt = f.grid.dt();
    const std::int64_t n = f.grid.n_steps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * f.values[j];
    }
    return acc * dt;
}

std::vector<SpectrumPoint> spectrum(const SampledField& f) {
    const double dt = f.grid.dt();
    const std::size_t n = f.values.size();
    auto spec = signal::fft_real(f.values);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    std::vector<SpectrumPoint> out;
    out.reserve(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k)
        out.push_back({domega * static_cast<double>(k), spec[k] * dt});
    return out;
}

double spectral_fwhm(const std::vector<SpectrumPoint>& spec) {
    std::size_t peak = 0;
    double amax = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double a = std::abs(spec[k].amplitude);
        if (a > amax) { amax = a; peak = k; }
    }
    if (amax == 0.0) return 0.0;
    const double half = amax / 2.0;
    auto cross = [&](std::size_t from, int dir) {
        std::size_t k = from;
        while (k > 0 && k + 1 < spec.size()) {
            const std::size_t next = k + dir;
            if (std::abs(spec[next].amplitude) < half) {
                // linear interpolation between k and next
                const double a0 = std::abs(spec[k].amplitude);
                const double a1 = std::abs(spec[next].amplitude);
                const double x = (a0 - half) / (a0 - a1);
                return spec[k].freq + x * (spec[next].freq - spec[k].freq);
            }
            k = next;
        }
        return spec[k].freq;
    };
    return cross(peak, +1) - cross(peak, -1);
}

void write_field_csv(const SampledField& f, const std::string& path) {
    auto out = csv::open_out(path);
    out << "t_fs,E_au\n";
    for (std::int64_t j = 0; j < f.grid.n_steps; ++j)
        out << csv::format(units::au_to_femtosecond(f.grid.time(j))) << ','
            << csv::format(f.values[j]) << '\n';
}

SampledField read_field_csv(const std::string& path) {
    auto in = csv::open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "t_fs,E_au")
        throw IoError("field csv: expected header 't_fs,E_au' in " + path);
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tok = csv::split(line);
        if (tok.size() != 2) throw IoError("field csv: bad row in " + path);
        t.push_back(units::femtosecond_to_au(csv::parse_double(tok[0])));
        v.push_back(csv::parse_double(tok[1]));
    }
    if (t.size() < 2) throw IoError("field csv: too few rows in " + path);
    SampledField f;
    f.grid = TimeGrid{t.front(), t.back(), static_cast<std::int64_t>(t.size())};
    f.values = std::move(v);
    f.validate();
    return f;
}

} // namespace rydopt
