#include "rydopt/dmorph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "rydopt/csv.hpp"
#include "rydopt/signal.hpp"

namespace rydopt {

namespace {

// S-weighted trapezoid inner product
double sdot(const TimeGrid& g, const std::vector<double>& S,
            const std::vector<double>& a, const std::vector<double>& b) {
    const std::int64_t n = g.n_steps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * S[j] * a[j] * b[j];
    }
    return acc * g.dt();
}

double plain_dot(const TimeGrid& g, const std::vector<double>& a,
                 const std::vector<double>& b) {
    const std::int64_t n = g.n_steps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * a[j] * b[j];
    }
    return acc * g.dt();
}

} // namespace

std::vector<double> objective_gradient(const SampledField& f, const SystemParams& p,
                                       const QuantumState& initial,
                                       const QuantumState& target,
                                       double* fidelity_out, int substeps) {
    auto res = fidelity_gradient(f, p, initial, target, substeps);
    if (fidelity_out) *fidelity_out = res.fidelity;
    // convert discrete dF/dv_j to the functional derivative dF/dE(t_j)
    const std::int64_t n = f.grid.n_steps;
    const double dt = f.grid.dt();
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        res.grad[j] /= dt * w;
    }
    return std::move(res.grad);
}

std::vector<std::vector<double>> constraint_gradients(const SampledField& f,
                                                      const SystemParams& p,
                                                      const ConstraintSet& cs) {
    const std::int64_t n = f.grid.n_steps;
    const auto freq = derived_frequencies(p);
    std::vector<std::vector<double>> out;
    if (cs.zero_area) out.emplace_back(n, 1.0); // c1 = 1
    if (cs.fluence) {                            // c2 = 2 E(t)
        std::vector<double> c(n);
        for (std::int64_t j = 0; j < n; ++j) c[j] = 2.0 * f.values[j];
        out.push_back(std::move(c));
    }
    if (cs.spectral_area) {                      // c3 = mu_d cos(w_sg t)
        std::vector<double> c(n);
        for (std::int64_t j = 0; j < n; ++j)
            c[j] = freq.mu_d * std::cos(freq.omega_sg * f.grid.time(j));
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<double> make_envelope(const TimeGrid& grid, EnvelopeShape shape,
                                  double window_tau) {
    const std::int64_t n = grid.n_steps;
    std::vector<double> S(n);
    if (shape == EnvelopeShape::sin2_window) {
        for (std::int64_t j = 0; j < n; ++j) {
            const double x = std::numbers::pi *
                             (grid.time(j) - grid.t0) / grid.span();
            S[j] = std::sin(x) * std::sin(x);
        }
    } else {
        const double tau = window_tau > 0.0 ? window_tau : grid.span() / 8.0;
        const double tc = 0.5 * (grid.t0 + grid.tf);
        const double edge = std::exp(-(grid.t0 - tc) * (grid.t0 - tc) /
                                     (2.0 * tau * tau));
        for (std::int64_t j = 0; j < n; ++j) {
            const double t = grid.time(j) - tc;
            S[j] = std::max(0.0, std::exp(-t * t / (2.0 * tau * tau)) - edge);
        }
    }
    return S;
}

SampledField dmorph_step(const SampledField& f, const std::vector<double>& g0,
                         const std::vector<std::vector<double>>& cgs,
                         const std::vector<double>& S, double ds,
                         double gram_regularization, StepDiagnostics* diag) {
    const std::int64_t n = f.grid.n_steps;
    const int M = static_cast<int>(cgs.size());
    const int dim = M + 1;

    // Gram matrix over (c0, c1..cM) with weight S
    Eigen::MatrixXd lambda(dim, dim);
    auto row = [&](int i) -> const std::vector<double>& {
        return i == 0 ? g0 : cgs[static_cast<std::size_t>(i - 1)];
    };
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = sdot(f.grid, S, row(i), row(j));
            lambda(i, j) = v;
            lambda(j, i) = v;
        }

    // scale to unit diagonal, regularize relatively, solve for the first
    // column of the inverse, then undo the scaling
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) {
        const double lii = lambda(i, i);
        if (!(lii > 0.0))
            throw NumericError("dmorph_step: vanishing diagonal Gram entry "
                               "(zero gradient or constraint)");
        d(i) = 1.0 / std::sqrt(lii);
    }
    Eigen::MatrixXd scaled = d.asDiagonal() * lambda * d.asDiagonal();
    for (int i = 0; i < dim; ++i) scaled(i, i) += gram_regularization;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cond = svd.singularValues()(0) /
                        svd.singularValues()(dim - 1);
    if (!(cond < 1e12))
        throw NumericError("dmorph_step: Gram matrix condition " +
                           std::to_string(cond) + " above threshold");

    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(dim);
    e0(0) = 1.0;
    // x solves Lambda x = e0; scaled system is (D Lambda D) y = D e0, x = D y
    Eigen::VectorXd y = svd.solve(d.asDiagonal() * e0);
    Eigen::VectorXd x = d.asDiagonal() * y;
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd r = e0 - lambda * x;
        Eigen::VectorXd dy = svd.solve(d.asDiagonal() * r);
        x += d.asDiagonal() * dy;
    }

    if (diag) {
        diag->gram_condition = cond;
        diag->solve_residual = (lambda * x - e0).norm() / e0.norm();
    }

    std::vector<double> dir(n, 0.0);
    for (int i = 0; i < dim; ++i) {
        const auto& ci = row(i);
        const double xi = x(i);
        for (std::int64_t j = 0; j < n; ++j) dir[j] += xi * ci[j];
    }

    if (diag) {
        diag->orthogonality.clear();
        const double dn = std::sqrt(sdot(f.grid, S, dir, dir));
        for (int mi = 0; mi < M; ++mi) {
            const auto& cm = cgs[static_cast<std::size_t>(mi)];
            const double cn = std::sqrt(sdot(f.grid, S, cm, cm));
            const double ip = sdot(f.grid, S, dir, cm);
            diag->orthogonality.push_back(
                (dn > 0 && cn > 0) ? ip / (dn * cn) : 0.0);
        }
    }

    SampledField out = f;
    for (std::int64_t j = 0; j < n; ++j) out.values[j] += ds * S[j] * dir[j];
    return out;
}

namespace {

struct ConstraintTargets {
    double zero_area = 0.0;
    double fluence = 0.0;
    double cos_area = 0.0; // mu_d int E cos(w_sg t)
    double sin_area = 0.0; // mu_d int E sin(w_sg t), 0 for symmetric seeds
};

double cosine_area(const SampledField& f, const SystemParams& p, bool sine) {
    const auto freq = derived_frequencies(p);
    const std::int64_t n = f.grid.n_steps;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        const double ph = freq.omega_sg * f.grid.time(j);
        acc += w * f.values[j] * (sine ? std::sin(ph) : std::cos(ph));
    }
    return freq.mu_d * acc * f.grid.dt();
}

// Restore the equality constraints exactly after a discrete Euler step.
// Newton iteration on all enabled constraints together, with S-windowed
// correction directions (S f for the fluence, S c_m for the linear ones)
// so boundary values never move. Corrections are O(ds^2), convergence is
// quadratic, residuals land at the solver floor in two or three passes.
void reproject(SampledField& f, const SystemParams& p, const ConstraintSet& cs,
               const std::vector<double>& S, const ConstraintTargets& tg) {
    const std::int64_t n = f.grid.n_steps;
    const auto freq = derived_frequencies(p);

    std::vector<double> c1(n, 1.0), c3(n), c4(n);
    for (std::int64_t j = 0; j < n; ++j) {
        const double ph = freq.omega_sg * f.grid.time(j);
        c3[j] = freq.mu_d * std::cos(ph);
        c4[j] = freq.mu_d * std::sin(ph);
    }

    for (int pass = 0; pass < 10; ++pass) {
        // active constraint gradients and residuals at the current field
        std::vector<const std::vector<double>*> grads;
        std::vector<double> resid;
        std::vector<double> scale;
        std::vector<double> two_f;
        if (cs.fluence) {
            two_f.resize(n);
            for (std::int64_t j = 0; j < n; ++j) two_f[j] = 2.0 * f.values[j];
            grads.push_back(&two_f);
            resid.push_back(fluence(f) - tg.fluence);
            scale.push_back(tg.fluence);
        }
        if (cs.zero_area) {
            grads.push_back(&c1);
            resid.push_back(zero_area(f) - tg.zero_area);
            scale.push_back(std::sqrt(tg.fluence * f.grid.span()));
        }
        if (cs.spectral_area) {
            grads.push_back(&c3);
            resid.push_back(cosine_area(f, p, false) - tg.cos_area);
            scale.push_back(1.0);
            grads.push_back(&c4);
            resid.push_back(cosine_area(f, p, true) - tg.sin_area);
            scale.push_back(1.0);
        }
        const int m = static_cast<int>(grads.size());
        if (m == 0) return;

        double worst = 0.0;
        for (int i = 0; i < m; ++i)
            worst = std::max(worst, std::abs(resid[i]) / std::max(scale[i], 1e-300));
        if (worst < 1e-13) return;

        // Newton step: f -= sum_k co_k S grad_k with J co = resid,
        // J[i][k] = <grad_i, S grad_k>
        Eigen::MatrixXd jac(m, m);
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            r(i) = resid[i];
            for (int k = 0; k < m; ++k)
                jac(i, k) = sdot(f.grid, S, *grads[i], *grads[k]);
        }
        Eigen::VectorXd co = jac.fullPivLu().solve(r);
        for (int k = 0; k < m; ++k) {
            const auto& g = *grads[k];
            const double ck = co(k);
            for (std::int64_t j = 0; j < n; ++j) f.values[j] -= ck * S[j] * g[j];
        }
    }
}

} // namespace

OptimizeResult optimize(const SampledField& seed, const SystemParams& p,
                        const ConstraintSet& cs, const DmorphConfig& cfg) {
    seed.validate();
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    PropagationOptions popts;
    popts.stepper = Stepper::magnus;
    popts.substeps = cfg.substeps;
    Propagator3LN prop(seed.grid, p, popts);

    const std::vector<double> S =
        make_envelope(seed.grid, cfg.envelope_shape, cfg.window_tau);

    ConstraintTargets targets;
    targets.zero_area = 0.0;
    targets.fluence = fluence(seed);
    targets.cos_area = cosine_area(seed, p, false);
    targets.sin_area = 0.0;

    auto wall = [&]() {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t_start)
            .count();
    };
    auto trace_row = [&](int iter, const SampledField& f, double fid, double ds) {
        const auto areas = pulse_areas(f, p);
        return TraceRow{iter, fid, fluence(f), std::abs(areas.theta_sg),
                        std::abs(areas.theta_es), ds, wall()};
    };

    SampledField f = seed;
    double fid = bell_fidelity(prop.final_state(f, ground_state()));
    OptimizeResult result;
    result.trace.push_back(trace_row(0, f, fid, cfg.ds_init));

    double ds = cfg.ds_init;
    const double ds_floor = 1e-15 * cfg.ds_init;
    int streak = 0;
    int iter = 0;
    while (iter < cfg.max_iters && fid < cfg.target_fidelity) {
        double cur_fid = 0.0;
        std::vector<double> g0 =
            objective_gradient(f, p, ground_state(), bell_state(), &cur_fid,
                               cfg.substeps);
        const auto cgs = constraint_gradients(f, p, cs);

        bool accepted = false;
        while (ds > ds_floor) {
            SampledField trial =
                dmorph_step(f, g0, cgs, S, ds, cfg.gram_regularization);
            reproject(trial, p, cs, S, targets);
            const double trial_fid =
                bell_fidelity(prop.final_state(trial, ground_state()));
            if (trial_fid >= fid) {
                f = std::move(trial);
                fid = trial_fid;
                accepted = true;
                ++streak;
                if (cfg.grow_factor > 1.0 && streak >= cfg.grow_after) {
                    ds *= cfg.grow_factor;
                    streak = 0;
                }
                break;
            }
            ds /= cfg.ds_shrink;
            streak = 0;
        }
        if (!accepted) {
            result.field = f;
            result.final_fidelity = fid;
            result.status = OptimizeStatus::stagnated;
            return result;
        }
        ++iter;
        result.trace.push_back(trace_row(iter, f, fid, ds));
    }

    result.field = std::move(f);
    result.final_fidelity = fid;
    result.status = fid >= cfg.target_fidelity ? OptimizeStatus::reached_target
                                               : OptimizeStatus::max_iters;
    return result;
}

PulseStructure analyze_structure(const SampledField& f, const SystemParams& p) {
    PulseStructure out;
    const std::int64_t n = f.grid.n_steps;
    const auto z = signal::analytic_signal(f.values);
    std::vector<double> env(n);
    double peak = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        env[j] = std::abs(z[j]);
        peak = std::max(peak, env[j]);
    }
    if (peak <= 0.0) return out;
    const double thresh = 0.2 * peak;

    // strict local maxima above threshold, separated by a carrier period
    const double carrier_period =
        2.0 * std::numbers::pi / derived_frequencies(p).omega_sg;
    const auto min_sep =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(carrier_period / f.grid.dt()));
    struct Peak {
        std::int64_t idx;
        double h;
    };
    std::vector<Peak> peaks;
    for (std::int64_t j = 1; j + 1 < n; ++j) {
        if (env[j] < thresh) continue;
        if (env[j] >= env[j - 1] && env[j] > env[j + 1]) {
            if (!peaks.empty() && j - peaks.back().idx < min_sep) {
                if (env[j] > peaks.back().h) peaks.back() = {j, env[j]};
            } else {
                peaks.push_back({j, env[j]});
            }
        }
    }
    out.n_subpulses = static_cast<int>(peaks.size());
    if (peaks.size() >= 2) {
        auto sorted = peaks;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Peak& a, const Peak& b) { return a.h > b.h; });
        out.separation = std::abs(f.grid.time(sorted[0].idx) -
                                  f.grid.time(sorted[1].idx));
    }
    return out;
}

void write_trace_csv(const OptimizationTrace& trace, const std::string& path) {
    auto out = csv::open_out(path);
    out << "iter,F,fluence,theta_sg,theta_es,ds,wall_ms\n";
    for (const auto& r : trace)
        out << r.iter << ',' << csv::format(r.fidelity) << ','
            << csv::format(r.fluence) << ',' << csv::format(r.theta_sg) << ','
            << csv::format(r.theta_es) << ',' << csv::format(r.ds) << ','
            << csv::format(r.wall_ms) << '\n';
}

} // namespace rydopt
