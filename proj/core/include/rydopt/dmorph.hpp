#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rydopt/propagate.hpp"

namespace rydopt {

struct ConstraintSet {
    bool zero_area = true;
    bool fluence = true;
    bool spectral_area = true;
    // targets: zero area -> 0, fluence -> seed fluence, spectral area -> pi/2
    // (the seed's cosine-quadrature area, pi/2 by construction for Eq.-(7) seeds)

    int count() const {
        return (zero_area ? 1 : 0) + (fluence ? 1 : 0) + (spectral_area ? 1 : 0);
    }
};

enum class EnvelopeShape { sin2_window, gaussian_window };

struct DmorphConfig {
    double ds_init = 2e-3;
    double ds_shrink = 10.0;       // reduce factor on fidelity decrease
    int max_iters = 3000;
    double target_fidelity = 1.0;
    EnvelopeShape envelope_shape = EnvelopeShape::sin2_window;
    double gram_regularization = 1e-12;
    double grow_factor = 0.0;      // optional step growth, off by default
    int grow_after = 5;
    int substeps = 8;              // magnus stepper substeps
    double window_tau = 0.0;       // gaussian_window width; 0 = span/8

    void validate() const {
        if (!(ds_init > 0.0)) throw ConfigError("DmorphConfig: ds_init must be > 0");
        if (!(ds_shrink > 1.0)) throw ConfigError("DmorphConfig: ds_shrink must exceed 1");
        if (max_iters < 1) throw ConfigError("DmorphConfig: max_iters must be >= 1");
        if (!(target_fidelity > 0.0) || target_fidelity > 1.0)
            throw ConfigError("DmorphConfig: target_fidelity must lie in (0, 1]");
        if (gram_regularization < 0.0)
            throw ConfigError("DmorphConfig: gram_regularization must be >= 0");
    }
};

struct TraceRow {
    int iter = 0;
    double fidelity = 0.0;
    double fluence = 0.0;
    double theta_sg = 0.0; // |theta_sg|
    double theta_es = 0.0; // |theta_es|
    double ds = 0.0;
    double wall_ms = 0.0;
};

using OptimizationTrace = std::vector<TraceRow>;

enum class OptimizeStatus { reached_target, max_iters, stagnated };

struct OptimizeResult {
    SampledField field;
    OptimizationTrace trace;
    OptimizeStatus status = OptimizeStatus::max_iters;
    double final_fidelity = 0.0;
};

struct StepDiagnostics {
    double gram_condition = 0.0;          // condition estimate of the scaled Gram
    double solve_residual = 0.0;          // |Lambda x - e0| / |e0|
    std::vector<double> orthogonality;    // S-weighted <dir, c_m>, relative
};

// functional derivative dF/dE(t_j) sampled on the grid (adjoint state method,
// exact for the discrete propagator, trapezoid measure division)
std::vector<double> objective_gradient(const SampledField& f, const SystemParams& p,
                                       const QuantumState& initial,
                                       const QuantumState& target,
                                       double* fidelity_out = nullptr,
                                       int substeps = 8);

// enabled constraint gradients in fixed order (zero_area, fluence, spectral_area)
std::vector<std::vector<double>> constraint_gradients(const SampledField& f,
                                                      const SystemParams& p,
                                                      const ConstraintSet& cs);

std::vector<double> make_envelope(const TimeGrid& grid, EnvelopeShape shape,
                                  double window_tau = 0.0);

// One Eq.-(5) Euler step: assemble the (M+1)x(M+1) Gram matrix, solve for the
// first row of its inverse, update f + ds * S * direction.
SampledField dmorph_step(const SampledField& f, const std::vector<double>& objective_grad,
                         const std::vector<std::vector<double>>& constraint_grads,
                         const std::vector<double>& envelope, double ds,
                         double gram_regularization = 1e-12,
                         StepDiagnostics* diag = nullptr);

OptimizeResult optimize(const SampledField& seed, const SystemParams& p,
                        const ConstraintSet& cs, const DmorphConfig& cfg);

struct PulseStructure {
    int n_subpulses = 0;
    double separation = 0.0; // a.u. between the two tallest envelope maxima
};
PulseStructure analyze_structure(const SampledField& f, const SystemParams& p);

void write_trace_csv(const OptimizationTrace& trace, const std::string& path);

} // namespace rydopt
