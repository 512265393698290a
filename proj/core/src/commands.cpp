#include "rydopt/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include <nlohmann/json.hpp>

#include "rydopt/csv.hpp"
#include "rydopt/signal.hpp"

namespace rydopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
    return p;
}

void write_json(const json& doc, const fs::path& path) {
    auto out = csv::open_out(path.string());
    out << doc.dump(2) << '\n';
}

void write_spectrum_csv(const SampledField& f, const fs::path& path) {
    const auto spec = spectrum(f);
    auto out = csv::open_out(path.string());
    out << "freq_au,re_amp,im_amp,abs_amp\n";
    for (const auto& pt : spec)
        out << csv::format(pt.freq) << ',' << csv::format(pt.amplitude.real()) << ','
            << csv::format(pt.amplitude.imag()) << ','
            << csv::format(std::abs(pt.amplitude)) << '\n';
}

SampledField build_pulse(const ExperimentConfig& cfg, const SystemParams& p) {
    if (cfg.pulse_source == "from_file") return read_field_csv(cfg.pulse_file);
    return gaussian_pulse(cfg.grid(), cfg.tau_au(), p);
}

} // namespace

void cmd_noise_gen(const ExperimentConfig& cfg, const CommandFlags&) {
    const auto dir = ensure_dir(cfg.output_dir);
    const TimeGrid grid = cfg.grid();
    NoiseSpec spec = cfg.noise_spec();

    const int n_real = std::max(cfg.n_realizations, 2);
    std::vector<double> psd_acc;
    std::vector<double> freq;
    for (int i = 0; i < n_real; ++i) {
        const auto real = generate(spec, grid, static_cast<std::uint64_t>(i));
        const auto pg = signal::periodogram(real.samples, grid.dt());
        if (psd_acc.empty()) {
            psd_acc.assign(pg.psd.size(), 0.0);
            freq = pg.freq;
        }
        for (std::size_t k = 0; k < pg.psd.size(); ++k) psd_acc[k] += pg.psd[k];
        if (i == 0) {
            auto out = csv::open_out((dir / "noise_realization.csv").string());
            out << "t_fs,sample\n";
            for (std::int64_t j = 0; j < grid.n_steps; ++j)
                out << csv::format(units::au_to_femtosecond(grid.time(j))) << ','
                    << csv::format(real.samples[j]) << '\n';
        }
    }
    for (double& v : psd_acc) v /= n_real;
    {
        auto out = csv::open_out((dir / "noise_psd.csv").string());
        out << "freq_au,psd\n";
        for (std::size_t k = 0; k < freq.size(); ++k)
            out << csv::format(freq[k]) << ',' << csv::format(psd_acc[k]) << '\n';
    }

    signal::Periodogram avg{freq, psd_acc};
    const auto fit = signal::fit_loglog_slope(avg);
    std::cout << "psd_slope=" << csv::format(fit.slope) << "±"
              << csv::format(fit.std_error) << '\n';

    if (spec.kind == NoiseKind::ou) {
        // average autocorrelation over realizations, fit exp(-lag dt / tau_c)
        const int max_lag = static_cast<int>(
            std::min<double>(3.0 * spec.tau_c / grid.dt(),
                             static_cast<double>(grid.n_steps) / 4.0));
        std::vector<double> acc(max_lag + 1, 0.0);
        for (int i = 0; i < n_real; ++i) {
            const auto real = generate(spec, grid, static_cast<std::uint64_t>(i));
            const auto r = signal::autocorrelation(real.samples, max_lag);
            for (int k = 0; k <= max_lag; ++k) acc[k] += r[k];
        }
        // least squares of log r(k) on lags with positive correlation
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int k = 1; k <= max_lag; ++k) {
            const double r = acc[k] / n_real;
            if (r <= 0.02) break;
            const double x = k * grid.dt();
            const double y = std::log(r);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        if (m >= 2) {
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            const double tau_fit = -1.0 / slope;
            std::cout << "fitted_tau_c_fs=" << csv::format(units::au_to_femtosecond(tau_fit))
                      << '\n';
        }
    }
}

void cmd_simulate(const ExperimentConfig& cfg, const CommandFlags&) {
    const auto dir = ensure_dir(cfg.output_dir);
    const SystemParams p = cfg.system_params();
    SampledField pulse = build_pulse(cfg, p);

    NoiseSpec spec = cfg.noise_spec();
    if (spec.epsilon > 0.0) {
        const auto eta = generate(spec, pulse.grid, 0);
        const bool amp = spec.channel == NoiseChannel::amplitude;
        pulse = apply_noise(pulse, amp ? &eta : nullptr, amp ? nullptr : &eta,
                            amp ? spec.epsilon : 0.0, amp ? 0.0 : spec.epsilon, p,
                            cfg.pulse_source == "gaussian"
                                ? std::optional<double>(cfg.tau_au())
                                : std::nullopt);
    }

    const ModelKind model = parse_model(cfg.model);
    PopulationHistory hist;
    double fid = 0.0;
    switch (model) {
    case ModelKind::three_level_numeric: {
        const auto psi = propagate_3ln(pulse, p, ground_state(), hist,
                                       cfg.propagation_options());
        fid = bell_fidelity(psi);
        break;
    }
    case ModelKind::three_level_magnus: {
        const auto psi = propagate_3la(pulse, p, ground_state(), hist);
        fid = bell_fidelity(psi);
        break;
    }
    case ModelKind::two_level_analytic: {
        hist = propagate_2la(pulse, p);
        fid = hist.p_s.back();
        break;
    }
    }
    write_history_csv(hist, (dir / "history.csv").string());

    json doc;
    doc["schema_version"] = 1;
    doc["model"] = cfg.model;
    doc["tau_fs"] = cfg.tau_fs;
    doc["noise_kind"] = cfg.noise_kind;
    doc["channel"] = cfg.noise_channel;
    doc["alpha"] = cfg.epsilon;
    doc["final_fidelity"] = fid;
    write_json(doc, dir / "final.json");
    std::cout << "final_F=" << csv::format(fid) << '\n';
}

void cmd_sweep(const ExperimentConfig& cfg, const CommandFlags& flags) {
    const auto dir = ensure_dir(cfg.output_dir);
    const SystemParams p = cfg.system_params();
    const auto rows = sweep(cfg.sweep_config());
    write_sweep_csv(rows, p, (dir / "sweep.csv").string());
    write_sweep_json(rows, p, (dir / "sweep.json").string());
    if (flags.dump_realizations)
        write_realizations_csv(rows, (dir / "realizations.csv").string());
    std::cout << "sweep_rows=" << rows.size() << '\n';
}

void cmd_optimize(const ExperimentConfig& cfg, const CommandFlags& flags) {
    const auto dir = ensure_dir(cfg.output_dir);
    const fs::path summary_path = dir / "optimize.json";
    if (flags.resume && fs::exists(summary_path)) {
        std::ifstream in(summary_path);
        json doc = json::parse(in, nullptr, false);
        if (!doc.is_discarded() && doc.value("status", "") == "reached_target") {
            std::cout << "already optimized; nothing to do\n";
            return;
        }
    }

    const SystemParams p = cfg.system_params();
    const SampledField seed = build_pulse(cfg, p);
    write_field_csv(seed, (dir / "seed_pulse.csv").string());
    write_spectrum_csv(seed, dir / "seed_spectrum.csv");

    ConstraintSet cs;
    const DmorphConfig dcfg = cfg.dmorph_config();
    OptimizeResult res = optimize(seed, p, cs, dcfg);

    write_field_csv(res.field, (dir / "optimized_pulse.csv").string());
    write_spectrum_csv(res.field, dir / "optimized_spectrum.csv");
    write_trace_csv(res.trace, (dir / "trace.csv").string());

    const auto structure = analyze_structure(res.field, p);
    const auto areas = pulse_areas(res.field, p);
    const auto seed_areas = pulse_areas(seed, p);

    json doc;
    doc["schema_version"] = 1;
    doc["status"] = res.status == OptimizeStatus::reached_target ? "reached_target"
                    : res.status == OptimizeStatus::max_iters    ? "max_iters"
                                                                 : "stagnated";
    doc["final_fidelity"] = res.final_fidelity;
    doc["iterations"] = res.trace.empty() ? 0 : res.trace.back().iter;
    doc["config"] = json::parse(R"({})");
    doc["config"]["tau_fs"] = cfg.tau_fs;
    doc["config"]["ds_init"] = dcfg.ds_init;
    doc["config"]["target_fidelity"] = dcfg.target_fidelity;
    doc["config"]["max_iters"] = dcfg.max_iters;
    doc["config"]["envelope_shape"] = cfg.envelope_shape;
    doc["constraint_residuals"]["zero_area"] = zero_area(res.field);
    doc["constraint_residuals"]["fluence_rel"] =
        fluence(res.field) / fluence(seed) - 1.0;
    doc["constraint_residuals"]["theta_sg_abs_minus_seed"] =
        std::abs(areas.theta_sg) - std::abs(seed_areas.theta_sg);
    doc["structure"]["n_subpulses"] = structure.n_subpulses;
    doc["structure"]["separation_fs"] =
        units::au_to_femtosecond(structure.separation);
    write_json(doc, summary_path);

    std::cout << "final_F=" << csv::format(res.final_fidelity)
              << " status=" << doc["status"].get<std::string>()
              << " iters=" << doc["iterations"].get<int>() << '\n';
    if (res.status == OptimizeStatus::stagnated)
        throw NumericError("optimize: step size underflow (stagnation); partial "
                           "results written to " + dir.string());
}

void cmd_reproduce(const std::string& figure_id, const ExperimentConfig& base,
                   const CommandFlags& flags) {
    ExperimentConfig cfg = base;
    const fs::path root = ensure_dir(base.output_dir);

    auto sub = [&](const std::string& name) {
        cfg.output_dir = (root / name).string();
        return cfg.output_dir;
    };

    if (figure_id == "fig2" || figure_id == "fig3") {
        sub(figure_id);
        cfg.sweep_taus_fs = {100.0, 250.0, 400.0};
        cfg.sweep_alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        cfg.n_realizations = 100;
        cfg.model = "3ln";
        cfg.noise_kind = "white";
        cfg.noise_channel = figure_id == "fig2" ? "amplitude" : "phase";
        cmd_sweep(cfg, flags);
        return;
    }
    if (figure_id == "fig4") {
        sub("fig4");
        cfg.tau_fs = 250.0;
        cfg.target_fidelity = 0.992;
        cmd_optimize(cfg, flags);
        // per-panel plot data from the trace
        const fs::path dir(cfg.output_dir);
        std::ifstream in(dir / "trace.csv");
        std::string line;
        std::getline(in, line);
        std::ofstream fa((dir / "fidelity.csv").string());
        std::ofstream fb((dir / "fluence.csv").string());
        std::ofstream fc((dir / "areas.csv").string());
        fa << "iter,F\n";
        fb << "iter,fluence\n";
        fc << "iter,theta_sg,theta_es\n";
        while (std::getline(in, line)) {
            const auto tok = csv::split(line);
            if (tok.size() < 7) continue;
            fa << tok[0] << ',' << tok[1] << '\n';
            fb << tok[0] << ',' << tok[2] << '\n';
            fc << tok[0] << ',' << tok[3] << ',' << tok[4] << '\n';
        }
        return;
    }
    if (figure_id == "appC-moderate" || figure_id == "appC-high") {
        const double alpha = figure_id == "appC-moderate" ? 0.05 : 0.5;
        const std::string name = figure_id;
        sub(name);
        cfg.tau_fs = 100.0;
        cfg.target_fidelity = 0.76;
        cmd_optimize(cfg, flags);

        const SystemParams p = cfg.system_params();
        const fs::path dir(cfg.output_dir);
        SampledField opt = read_field_csv((dir / "optimized_pulse.csv").string());

        NoiseSpec spec = cfg.noise_spec();
        spec.kind = NoiseKind::white;
        spec.channel = NoiseChannel::amplitude;
        spec.epsilon = alpha;

        // ensemble-averaged P_s(t) for the three models under the same
        // amplitude-noise realizations
        const int n_real = 20;
        const auto n = opt.grid.n_steps;
        std::vector<double> ps_3ln(n, 0.0), ps_3la(n, 0.0), ps_2la(n, 0.0);
        Propagator3LN prop(opt.grid, p, cfg.propagation_options());
        for (int i = 0; i < n_real; ++i) {
            const auto eta = generate(spec, opt.grid, static_cast<std::uint64_t>(i));
            const SampledField noisy = apply_noise(opt, &eta, nullptr, alpha, 0.0, p);
            PopulationHistory h3ln, h3la;
            prop.final_state(noisy, ground_state(), h3ln);
            propagate_3la(noisy, p, ground_state(), h3la);
            const PopulationHistory h2la = propagate_2la(noisy, p);
            for (std::int64_t j = 0; j < n; ++j) {
                ps_3ln[j] += h3ln.p_s[j];
                ps_3la[j] += h3la.p_s[j];
                ps_2la[j] += h2la.p_s[j];
            }
        }
        auto out = csv::open_out((dir / "models_ps.csv").string());
        out << "t_fs,ps_3ln,ps_3la,ps_2la\n";
        for (std::int64_t j = 0; j < n; ++j)
            out << csv::format(units::au_to_femtosecond(opt.grid.time(j))) << ','
                << csv::format(ps_3ln[j] / n_real) << ','
                << csv::format(ps_3la[j] / n_real) << ','
                << csv::format(ps_2la[j] / n_real) << '\n';
        std::cout << "models_ps rows=" << n << " alpha=" << csv::format(alpha)
                  << " realizations=" << n_real << '\n';
        return;
    }
    throw UsageError("unknown figure id '" + figure_id +
                     "' (valid: fig2, fig3, fig4, appC-moderate, appC-high)");
}

} // namespace rydopt
