#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rydopt/dmorph.hpp"
#include "rydopt/ensemble.hpp"

namespace rydopt {

// Flat key = value configuration with [section] headers. Values are stored in
// the units they are written in (cm^-1, fs, debye) and converted to atomic
// units through the accessors, so a parse -> serialize -> parse round trip is
// exact. Unknown keys are rejected.
struct ExperimentConfig {
    // [system]
    double omega0_cm1 = 12578.95;
    double mu_debye = 7.61;
    double vdd_cm1 = 12.35;

    // [grid]
    double tau_fs = 250.0;
    std::int64_t n_steps = 10000;
    double span_tau = 4.0;

    // [noise]
    std::string noise_kind = "white";
    std::string noise_channel = "amplitude";
    double epsilon = 0.0;
    double beta = 1.0;
    double tau_c_fs = 100.0;
    std::string pink_generator = "spectral";

    // [sweep]
    std::vector<double> sweep_taus_fs = {100.0, 250.0, 400.0};
    std::vector<double> sweep_alphas = {0.0};
    int n_realizations = 100;
    std::string model = "3ln";
    std::string pulse_source = "gaussian";
    std::string pulse_file;

    // [dmorph]
    double ds_init = 2e-3;
    double ds_shrink = 10.0;
    int max_iters = 3000;
    double target_fidelity = 0.99;
    std::string envelope_shape = "sin2";
    double gram_regularization = 1e-12;
    double grow_factor = 1.2;
    int grow_after = 5;

    // [propagate]
    std::string stepper = "magnus";
    int substeps = 8;

    // top level
    std::uint64_t master_seed = 12345;
    std::string output_dir = "out";
    int threads = 0;

    // derived accessors (atomic units)
    SystemParams system_params() const;
    TimeGrid grid() const;
    double tau_au() const;
    NoiseSpec noise_spec() const;
    SweepConfig sweep_config() const;
    DmorphConfig dmorph_config() const;
    PropagationOptions propagation_options() const;

    void validate() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

// assign one key (optionally section-qualified as "section.key")
void set_config_value(ExperimentConfig& cfg, const std::string& section,
                      const std::string& key, const std::string& value);

} // namespace rydopt
