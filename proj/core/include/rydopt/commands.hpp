#pragma once

#include <string>

#include "rydopt/config.hpp"

namespace rydopt {

struct CommandFlags {
    bool dump_realizations = false;
    bool resume = false;
};

// Each command writes its artifacts under cfg.output_dir and prints a short
// summary to stdout. Exceptions map to exit codes in the CLI layer.
void cmd_noise_gen(const ExperimentConfig& cfg, const CommandFlags& flags = {});
void cmd_simulate(const ExperimentConfig& cfg, const CommandFlags& flags = {});
void cmd_sweep(const ExperimentConfig& cfg, const CommandFlags& flags = {});
void cmd_optimize(const ExperimentConfig& cfg, const CommandFlags& flags = {});
void cmd_reproduce(const std::string& figure_id, const ExperimentConfig& base,
                   const CommandFlags& flags = {});

} // namespace rydopt
