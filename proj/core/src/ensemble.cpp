#include "rydopt/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "rydopt/csv.hpp"
#include "rydopt/signal.hpp"

namespace rydopt {

namespace {

SampledField base_pulse(double tau, const SweepConfig& cfg, const SystemParams& p) {
    if (cfg.pulse_source == SweepConfig::PulseSource::from_file)
        return read_field_csv(cfg.pulse_file);
    const TimeGrid grid = TimeGrid::centered(tau, cfg.span_tau, cfg.n_steps);
    return gaussian_pulse(grid, tau, p);
}

double model_fidelity(const SampledField& f, const SystemParams& p,
                      ModelKind model, const Propagator3LN* prop) {
    switch (model) {
    case ModelKind::three_level_numeric:
        return bell_fidelity(prop->final_state(f, ground_state()));
    case ModelKind::three_level_magnus:
        return bell_fidelity(propagate_3la(f, p, ground_state()));
    case ModelKind::two_level_analytic: {
        const auto areas = pulse_areas(f, p);
        const double th = std::abs(areas.theta_sg);
        return std::sin(th) * std::sin(th);
    }
    }
    throw ConfigError("model_fidelity: bad model");
}

} // namespace

EnsembleResult run_ensemble(double tau, double alpha, const SweepConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const SystemParams p = SystemParams::paper();

    const SampledField base = base_pulse(tau, cfg, p);
    const bool analytic_envelope =
        cfg.pulse_source == SweepConfig::PulseSource::gaussian;

    Propagator3LN prop(base.grid, p, cfg.prop);

    NoiseSpec spec = cfg.noise;
    spec.epsilon = alpha;

    EnsembleResult res;
    res.tau = tau;
    res.alpha = alpha;
    res.kind = spec.kind;
    res.channel = spec.channel;
    res.model = cfg.model;
    res.seed = spec.seed;
    res.fidelities.assign(cfg.n_realizations, 0.0);

    if (alpha == 0.0) {
        const double f0 = model_fidelity(base, p, cfg.model, &prop);
        std::fill(res.fidelities.begin(), res.fidelities.end(), f0);
    } else {
        const bool amp = spec.channel == NoiseChannel::amplitude;
        std::string error;
#ifdef _OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < cfg.n_realizations; ++i) {
            try {
                const NoiseRealization eta =
                    generate(spec, base.grid, static_cast<std::uint64_t>(i));
                const SampledField noisy =
                    amp ? apply_noise(base, &eta, nullptr, alpha, 0.0, p)
                        : apply_noise(base, nullptr, &eta, 0.0, alpha, p,
                                      analytic_envelope ? std::optional<double>(tau)
                                                        : std::nullopt);
                res.fidelities[i] = model_fidelity(noisy, p, cfg.model, &prop);
            } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (error.empty())
                    error = "realization " + std::to_string(i) + ": " + e.what();
            }
        }
        if (!error.empty()) throw PropagationError("run_ensemble: " + error);
    }

    // ordered reduction keyed by realization index; identical samples give
    // exactly zero spread
    bool all_equal = true;
    for (double f : res.fidelities)
        if (f != res.fidelities.front()) { all_equal = false; break; }
    if (all_equal) {
        res.mean_fidelity = res.fidelities.front();
        res.std_fidelity = 0.0;
    } else {
        double mean = 0.0;
        for (double f : res.fidelities) mean += f;
        mean /= res.fidelities.size();
        double var = 0.0;
        for (double f : res.fidelities) var += (f - mean) * (f - mean);
        res.mean_fidelity = mean;
        res.std_fidelity = std::sqrt(var / (res.fidelities.size() - 1));
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
    return res;
}

std::vector<EnsembleResult> sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<EnsembleResult> out;
    out.reserve(cfg.taus.size() * cfg.alphas.size());
    for (double tau : cfg.taus)
        for (double alpha : cfg.alphas)
            out.push_back(run_ensemble(tau, alpha, cfg));
    return out;
}

QuadraticFit fit_quadratic(const std::vector<double>& alphas,
                           const std::vector<double>& means) {
    if (alphas.size() != means.size() || alphas.size() < 3)
        throw ConfigError("fit_quadratic: need >= 3 (alpha, mean) points");
    if (std::find(alphas.begin(), alphas.end(), 0.0) == alphas.end())
        throw ConfigError("fit_quadratic: alpha = 0 point required");
    // linear least squares on F = f0 - b alpha^2 with b = f0 c_A
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double x = alphas[i] * alphas[i];
        s1 += 1.0; sx += x; sxx += x * x;
        sy += means[i]; sxy += x * means[i];
    }
    const double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-30)
        throw NumericError("fit_quadratic: degenerate design matrix (all alphas equal)");
    const double f0 = (sxx * sy - sx * sxy) / det;
    const double slope = (s1 * sxy - sx * sy) / det; // = -f0 c_A
    QuadraticFit fit;
    fit.f0 = f0;
    fit.c_a = (f0 != 0.0) ? -slope / f0 : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double r = means[i] - (f0 + slope * alphas[i] * alphas[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / alphas.size());
    return fit;
}

QuadraticFit fit_quadratic(const std::vector<EnsembleResult>& results) {
    std::vector<double> a, m;
    for (const auto& r : results) {
        a.push_back(r.alpha);
        m.push_back(r.mean_fidelity);
    }
    return fit_quadratic(a, m);
}

double predict_breakdown(const SampledField& f, const SystemParams& p,
                         DurationConvention convention) {
    f.validate();
    double vmax = 0.0;
    const auto z = signal::analytic_signal(f.values);
    for (const auto& zj : z) vmax = std::max(vmax, std::abs(zj));
    if (vmax <= 0.0)
        throw NumericError("predict_breakdown: zero field");
    const double omega_peak = derived_frequencies(p).mu_d * vmax;

    double duration = 0.0;
    switch (convention) {
    case DurationConvention::full_window:
        duration = f.grid.span();
        break;
    case DurationConvention::tau:
    case DurationConvention::fwhm: {
        // second-moment width of the envelope as the tau estimate
        double w0 = 0, w1 = 0, w2 = 0;
        for (std::int64_t j = 0; j < f.grid.n_steps; ++j) {
            const double e2 = std::abs(z[j]);
            const double t = f.grid.time(j);
            w0 += e2; w1 += e2 * t; w2 += e2 * t * t;
        }
        const double mean = w1 / w0;
        const double tau_est = std::sqrt(std::max(0.0, w2 / w0 - mean * mean));
        duration = convention == DurationConvention::tau
                       ? tau_est
                       : 2.0 * std::sqrt(2.0 * std::log(2.0)) * tau_est;
        break;
    }
    }
    return 1.0 / (omega_peak * duration);
}

namespace {

void write_rows(std::ostream& out, const std::vector<EnsembleResult>& rows,
                const SystemParams& p) {
    out << "tau_fs,dw_over_vdd,noise_kind,channel,alpha,model,mean_F,std_F,n,seed,wall_ms\n";
    for (const auto& r : rows) {
        out << csv::format(units::au_to_femtosecond(r.tau)) << ','
            << csv::format(bandwidth(r.tau) / p.vdd) << ','
            << noise_kind_name(r.kind) << ',' << channel_name(r.channel) << ','
            << csv::format(r.alpha) << ',' << model_name(r.model) << ','
            << csv::format(r.mean_fidelity) << ',' << csv::format(r.std_fidelity) << ','
            << r.fidelities.size() << ',' << r.seed << ','
            << csv::format(r.wall_ms) << '\n';
    }
}

} // namespace

void write_sweep_csv(const std::vector<EnsembleResult>& rows, const SystemParams& p,
                     const std::string& path) {
    auto out = csv::open_out(path);
    write_rows(out, rows, p);
}

void write_sweep_json(const std::vector<EnsembleResult>& rows, const SystemParams& p,
                      const std::string& path) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    auto& arr = doc["rows"];
    for (const auto& r : rows) {
        nlohmann::json row;
        row["tau_fs"] = units::au_to_femtosecond(r.tau);
        row["dw_over_vdd"] = bandwidth(r.tau) / p.vdd;
        row["noise_kind"] = noise_kind_name(r.kind);
        row["channel"] = channel_name(r.channel);
        row["alpha"] = r.alpha;
        row["model"] = model_name(r.model);
        row["mean_F"] = r.mean_fidelity;
        row["std_F"] = r.std_fidelity;
        row["n"] = r.fidelities.size();
        row["seed"] = r.seed;
        row["wall_ms"] = r.wall_ms;
        arr.push_back(row);
    }
    auto out = csv::open_out(path);
    out << doc.dump(2) << '\n';
}

void write_realizations_csv(const std::vector<EnsembleResult>& rows,
                            const std::string& path) {
    auto out = csv::open_out(path);
    out << "tau_fs,alpha,realization,F\n";
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.fidelities.size(); ++i)
            out << csv::format(units::au_to_femtosecond(r.tau)) << ','
                << csv::format(r.alpha) << ',' << i << ','
                << csv::format(r.fidelities[i]) << '\n';
}

} // namespace rydopt
