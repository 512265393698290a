#pragma once

#include <complex>
#include <vector>

namespace rydopt::signal {

// thin wrappers around the kissfft backend in Eigen/unsupported
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> fft_real(const std::vector<double>& x);

// analytic signal z with Re z = x; |z| is the envelope, arg z the phase
std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x);

// one-sided periodogram; returns (omega_k, psd_k) for k = 1..n/2, omega in rad/a.u.
struct Periodogram {
    std::vector<double> freq;
    std::vector<double> psd;
};
Periodogram periodogram(const std::vector<double>& x, double dt);

// least-squares slope of log10(psd) vs log10(freq) over the middle `decades`
// of the frequency axis
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
};
SlopeFit fit_loglog_slope(const Periodogram& pg, double decades = 2.0);

// lag-k autocorrelation estimates r[0..max_lag]
std::vector<double> autocorrelation(const std::vector<double>& x, int max_lag);

} // namespace rydopt::signal
