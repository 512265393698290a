#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "rydopt/commands.hpp"

namespace rydopt::cli {

namespace {

struct Overrides {
    std::optional<std::string> config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<int> threads;
    std::optional<std::string> model;
    std::optional<double> tau_fs;
    std::optional<std::int64_t> n_steps;
    std::optional<double> span_tau;
    std::optional<std::string> kind;
    std::optional<std::string> channel;
    std::optional<double> alpha;
    std::optional<double> tau_c_fs;
    std::optional<int> n_realizations;
    std::optional<std::string> taus_fs;
    std::optional<std::string> alphas;
    std::optional<double> target_fidelity;
    std::optional<int> max_iters;
    std::optional<double> ds_init;
    std::optional<std::string> envelope_shape;
    std::optional<std::string> stepper;
    std::optional<int> substeps;
    std::optional<std::string> pulse_file;
    bool paper_stepper = false;
    bool pink_voss = false;
    CommandFlags flags;
};

void add_common(CLI::App* sub, Overrides& ov) {
    sub->add_option("--config", ov.config_file, "experiment config file");
    sub->add_option("--seed", ov.seed, "master seed (overrides file and env)");
    sub->add_option("--output-dir", ov.output_dir, "output directory");
    sub->add_option("--threads", ov.threads, "worker thread cap");
    sub->add_option("--tau-fs", ov.tau_fs, "pulse duration tau in fs");
    sub->add_option("--n-steps", ov.n_steps, "grid points");
    sub->add_option("--span-tau", ov.span_tau, "half-window in units of tau");
    sub->add_option("--stepper", ov.stepper, "3LN stepper: magnus|midpoint|paper");
    sub->add_option("--substeps", ov.substeps, "magnus sub-exponentials per interval");
    sub->add_flag("--paper-stepper", ov.paper_stepper,
                  "use the left-endpoint expm stepping");
}

ExperimentConfig assemble(const Overrides& ov) {
    ExperimentConfig cfg;
    if (ov.config_file) cfg = parse_config_file(*ov.config_file);
    // env overrides file
    if (const char* env = std::getenv("RYDOPT_SEED")) {
        cfg.master_seed = std::strtoull(env, nullptr, 10);
    }
    // CLI overrides everything
    if (ov.seed) cfg.master_seed = *ov.seed;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.model) cfg.model = *ov.model;
    if (ov.tau_fs) cfg.tau_fs = *ov.tau_fs;
    if (ov.n_steps) cfg.n_steps = *ov.n_steps;
    if (ov.span_tau) cfg.span_tau = *ov.span_tau;
    if (ov.kind) cfg.noise_kind = *ov.kind;
    if (ov.channel) cfg.noise_channel = *ov.channel;
    if (ov.alpha) cfg.epsilon = *ov.alpha;
    if (ov.tau_c_fs) cfg.tau_c_fs = *ov.tau_c_fs;
    if (ov.n_realizations) cfg.n_realizations = *ov.n_realizations;
    if (ov.taus_fs) set_config_value(cfg, "sweep", "taus_fs", *ov.taus_fs);
    if (ov.alphas) set_config_value(cfg, "sweep", "alphas", *ov.alphas);
    if (ov.target_fidelity) cfg.target_fidelity = *ov.target_fidelity;
    if (ov.max_iters) cfg.max_iters = *ov.max_iters;
    if (ov.ds_init) cfg.ds_init = *ov.ds_init;
    if (ov.envelope_shape) cfg.envelope_shape = *ov.envelope_shape;
    if (ov.stepper) cfg.stepper = *ov.stepper;
    if (ov.substeps) cfg.substeps = *ov.substeps;
    if (ov.pulse_file) {
        cfg.pulse_file = *ov.pulse_file;
        cfg.pulse_source = "from_file";
    }
    if (ov.paper_stepper) cfg.stepper = "paper";
    if (ov.pink_voss) cfg.pink_generator = "voss";
    cfg.validate();
    return cfg;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"rydopt - Rydberg Bell-state pulse simulation and optimization"};
    app.require_subcommand(1);

    Overrides ov;

    auto* noise_gen = app.add_subcommand(
        "noise-gen", "generate noise realizations and their periodograms");
    add_common(noise_gen, ov);
    noise_gen->add_option("--kind", ov.kind, "white|pink|ou");
    noise_gen->add_option("--channel", ov.channel, "amplitude|phase");
    noise_gen->add_option("--tau-c-fs", ov.tau_c_fs, "OU correlation time, fs");
    noise_gen->add_option("--n-realizations", ov.n_realizations, "realizations to average");
    noise_gen->add_flag("--pink-voss", ov.pink_voss, "Voss-McCartney pink generator");

    auto* simulate = app.add_subcommand(
        "simulate", "single trajectory: population history and final fidelity");
    add_common(simulate, ov);
    simulate->add_option("--model", ov.model, "3ln|3la|2la");
    simulate->add_option("--kind", ov.kind, "noise kind");
    simulate->add_option("--channel", ov.channel, "noise channel");
    simulate->add_option("--alpha", ov.alpha, "noise amplitude");
    simulate->add_option("--tau-c-fs", ov.tau_c_fs, "OU correlation time, fs");
    simulate->add_option("--pulse-file", ov.pulse_file, "load the pulse from CSV");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Monte Carlo ensemble sweep over tau x alpha");
    add_common(sweep_cmd, ov);
    sweep_cmd->add_option("--model", ov.model, "3ln|3la|2la");
    sweep_cmd->add_option("--kind", ov.kind, "noise kind");
    sweep_cmd->add_option("--channel", ov.channel, "noise channel");
    sweep_cmd->add_option("--taus-fs", ov.taus_fs, "comma list of taus, fs");
    sweep_cmd->add_option("--alphas", ov.alphas, "comma list of noise amplitudes");
    sweep_cmd->add_option("--tau-c-fs", ov.tau_c_fs, "OU correlation time, fs");
    sweep_cmd->add_option("--n-realizations", ov.n_realizations, "per point");
    sweep_cmd->add_option("--pulse-file", ov.pulse_file, "sweep a pulse from CSV");
    sweep_cmd->add_flag("--dump-realizations", ov.flags.dump_realizations,
                        "write per-realization fidelities");

    auto* optimize_cmd = app.add_subcommand(
        "optimize", "D-MORPH constrained pulse optimization");
    add_common(optimize_cmd, ov);
    optimize_cmd->add_option("--target-fidelity", ov.target_fidelity, "stop threshold");
    optimize_cmd->add_option("--max-iters", ov.max_iters, "iteration cap");
    optimize_cmd->add_option("--ds-init", ov.ds_init, "initial step size");
    optimize_cmd->add_option("--envelope-shape", ov.envelope_shape, "sin2|gaussian");
    optimize_cmd->add_option("--pulse-file", ov.pulse_file, "seed pulse from CSV");
    optimize_cmd->add_flag("--resume", ov.flags.resume,
                           "exit 0 if a finished run exists in output-dir");

    std::string figure_id;
    auto* reproduce = app.add_subcommand(
        "reproduce", "run a canned scenario (fig2, fig3, fig4, appC-moderate, appC-high)");
    add_common(reproduce, ov);
    reproduce->add_option("id", figure_id, "scenario id")->required();

    try {
        // CLI11 wants argc/argv-style input, most recent first
        std::vector<const char*> argv;
        argv.push_back("rydopt");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const ExperimentConfig cfg = assemble(ov);
        if (noise_gen->parsed()) cmd_noise_gen(cfg, ov.flags);
        else if (simulate->parsed()) cmd_simulate(cfg, ov.flags);
        else if (sweep_cmd->parsed()) cmd_sweep(cfg, ov.flags);
        else if (optimize_cmd->parsed()) cmd_optimize(cfg, ov.flags);
        else if (reproduce->parsed()) cmd_reproduce(figure_id, cfg, ov.flags);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace rydopt::cli
