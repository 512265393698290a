#include "rydopt/signal.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rydopt::signal {

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
    Eigen::FFT<double> f;
    std::vector<std::complex<double>> out;
    f.fwd(out, x);
    return out;
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
    Eigen::FFT<double> f;
    std::vector<std::complex<double>> out;
    f.inv(out, x);
    return out;
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> cx(x.begin(), x.end());
    return fft(cx);
}

std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
    const std::size_t n = x.size();
    auto spec = fft_real(x);
    // keep DC (and the Nyquist bin for even n), double the positive
    // frequencies, zero the negative ones
    if (n % 2 == 0) {
        for (std::size_t k = 1; k < n / 2; ++k) spec[k] *= 2.0;
        for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
    } else {
        for (std::size_t k = 1; k <= n / 2; ++k) spec[k] *= 2.0;
        for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
    }
    return ifft(spec);
}

Periodogram periodogram(const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    auto spec = fft_real(x);
    Periodogram pg;
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    const double norm = dt / static_cast<double>(n); // |X dt|^2 / (n dt)
    for (std::size_t k = 1; k <= n / 2; ++k) {
        pg.freq.push_back(domega * static_cast<double>(k));
        pg.psd.push_back(std::norm(spec[k]) * norm);
    }
    return pg;
}

SlopeFit fit_loglog_slope(const Periodogram& pg, double decades) {
    const double lo_all = std::log10(pg.freq.front());
    const double hi_all = std::log10(pg.freq.back());
    const double mid = 0.5 * (lo_all + hi_all);
    const double lo = mid - 0.5 * decades;
    const double hi = mid + 0.5 * decades;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < pg.freq.size(); ++k) {
        const double lx = std::log10(pg.freq[k]);
        if (lx < lo || lx > hi || pg.psd[k] <= 0.0) continue;
        const double ly = std::log10(pg.psd[k]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    SlopeFit out;
    if (n < 3) return out;
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    const double b = (sy - out.slope * sx) / n;
    double ss = 0;
    for (std::size_t k = 0; k < pg.freq.size(); ++k) {
        const double lx = std::log10(pg.freq[k]);
        if (lx < lo || lx > hi || pg.psd[k] <= 0.0) continue;
        const double r = std::log10(pg.psd[k]) - (out.slope * lx + b);
        ss += r * r;
    }
    out.std_error = std::sqrt(ss / std::max(1, n - 2) * n / den);
    return out;
}

std::vector<double> autocorrelation(const std::vector<double>& x, int max_lag) {
    const int n = static_cast<int>(x.size());
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    std::vector<double> r(max_lag + 1, 0.0);
    for (int lag = 0; lag <= max_lag; ++lag) {
        double s = 0;
        for (int j = 0; j + lag < n; ++j)
            s += (x[j] - mean) * (x[j + lag] - mean);
        r[lag] = (var > 0) ? s / var : 0.0;
    }
    return r;
}

} // namespace rydopt::signal
