#include "rydopt/propagate.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>

#include "rydopt/csv.hpp"

namespace rydopt {

using std::complex;
namespace {

using cd = complex<double>;

// sin(r)/r and (cos r - 1)/r^2 as functions of u = r^2
struct ArrowCoeffs {
    double s, c;
};
inline ArrowCoeffs arrow_coeffs(double u) {
    if (u < 1e-6) {
        return {1.0 - u / 6.0 + u * u / 120.0,
                -0.5 + u / 24.0 - u * u / 720.0};
    }
    const double r = std::sqrt(u);
    return {std::sin(r) / r, (std::cos(r) - 1.0) / u};
}
inline void arrow_coeff_derivs(double u, const ArrowCoeffs& sc, double& ds, double& dc) {
    if (u < 1e-6) {
        ds = -1.0 / 6.0 + u / 60.0;
        dc = 1.0 / 24.0 - u / 360.0;
        return;
    }
    ds = (std::cos(std::sqrt(u)) - sc.s) / (2.0 * u);
    dc = -(0.5 * sc.s + sc.c) / u;
}

// psi <- exp(-i M(a,b)) psi for the arrowhead generator
// M = [[0, conj(a), 0], [a, 0, conj(b)], [0, b, 0]];  M^3 = r^2 M
inline void apply_arrow_exp(cd a, cd b, cd* psi) {
    const double u = std::norm(a) + std::norm(b);
    const auto [s, c] = arrow_coeffs(u);
    const cd m0 = std::conj(a) * psi[1];
    const cd m1 = a * psi[0] + std::conj(b) * psi[2];
    const cd m2 = b * psi[1];
    const cd mm0 = std::conj(a) * m1;
    const cd mm1 = a * m0 + std::conj(b) * m2;
    const cd mm2 = b * m1;
    const cd is(0.0, -s);
    psi[0] += is * m0 + c * mm0;
    psi[1] += is * m1 + c * mm1;
    psi[2] += is * m2 + c * mm2;
}

struct Moments {
    cd i0, i1;
};
Moments oscillatory_moments(double phi, double x0, double x1) {
    if (std::abs(phi) < 1e-9) {
        return {cd(x1 - x0, 0.0), cd(0.5 * (x1 * x1 - x0 * x0), 0.0)};
    }
    const cd iphi(0.0, phi);
    const cd e1 = std::exp(iphi * x1);
    const cd e0 = std::exp(iphi * x0);
    const cd i0 = (e1 - e0) / iphi;
    const cd i1 = (x1 * e1 - x0 * e0) / iphi - i0 / iphi;
    return {i0, i1};
}

void check_field(const SampledField& f, const TimeGrid& grid) {
    if (!(f.grid == grid))
        throw UsageError("propagate: field grid does not match propagator grid");
    for (std::size_t j = 0; j < f.values.size(); ++j)
        if (!std::isfinite(f.values[j]))
            throw PropagationError("propagate: non-finite field sample at step " +
                                   std::to_string(j));
}

// lab-frame exponential step via eigendecomposition of the real symmetric H
inline void apply_lab_exp(const SystemParams& p, double field, double dt, cd* psi) {
    const Eigen::Matrix3d h = build_hamiltonian(p, field);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(h);
    const Eigen::Matrix3d& q = es.eigenvectors();
    const Eigen::Vector3d& lam = es.eigenvalues();
    Eigen::Vector3cd v(psi[0], psi[1], psi[2]);
    Eigen::Vector3cd w = q.transpose() * v;
    for (int i = 0; i < 3; ++i) w(i) *= std::polar(1.0, -lam(i) * dt);
    v = q * w;
    psi[0] = v(0); psi[1] = v(1); psi[2] = v(2);
}

constexpr int kInterior = 0, kLeft = 1, kRight = 2;

} // namespace

struct Propagator3LN::Impl {
    TimeGrid grid;
    SystemParams params;
    PropagationOptions opts;
    DerivedFrequencies freq;

    // local field model E(x) = Re[(B + C x) e^{i theta x}], x = (t - tm)/dt;
    // (B, C) solved through 4 stencil samples with a constant 4x4 inverse
    cd brow[3][4];
    cd crow[3][4];

    // per-substep moment weights; increment = -phase[k] * (B w0 + C w1 +
    // conj(B) v0 + conj(C) v1), mu_d dt / 2 folded in
    std::vector<cd> w0_sg, w1_sg, v0_sg, v1_sg;
    std::vector<cd> w0_es, w1_es, v0_es, v1_es;

    // per-interval channel phases e^{i w_X tm_k}
    std::vector<cd> ph_sg, ph_es;

    void build();

    int stencil_type(std::int64_t k) const {
        if (k == 0) return kLeft;
        if (k == grid.n_steps - 2) return kRight;
        return kInterior;
    }
    std::int64_t stencil_base(std::int64_t k) const {
        if (k == 0) return 0;
        if (k == grid.n_steps - 2) return grid.n_steps - 4;
        return k - 1;
    }

    void increments(const double* v, std::int64_t k, cd* a, cd* b) const {
        const int sten = stencil_type(k);
        const std::int64_t base = stencil_base(k);
        cd bc = 0.0, cc = 0.0;
        for (int c = 0; c < 4; ++c) {
            bc += brow[sten][c] * v[base + c];
            cc += crow[sten][c] * v[base + c];
        }
        bracket(k, sten, bc, cc, a, b);
    }

    // da[s], db[s] for a unit perturbation of stencil sample `col`
    void increment_weights(std::int64_t k, int col, cd* da, cd* db) const {
        const int sten = stencil_type(k);
        bracket(k, sten, brow[sten][col], crow[sten][col], da, db);
    }

    void bracket(std::int64_t k, int sten, cd bc, cd cc, cd* a, cd* b) const {
        (void)sten;
        const cd bb = std::conj(bc), cb = std::conj(cc);
        const int m = opts.substeps;
        for (int s = 0; s < m; ++s) {
            a[s] = -ph_sg[k] * (bc * w0_sg[s] + cc * w1_sg[s] + bb * v0_sg[s] + cb * v1_sg[s]);
            b[s] = -ph_es[k] * (bc * w0_es[s] + cc * w1_es[s] + bb * v0_es[s] + cb * v1_es[s]);
        }
    }
};

void Propagator3LN::Impl::build() {
    grid.validate();
    params.validate();
    if (grid.n_steps < 4)
        throw ConfigError("Propagator3LN: need at least 4 grid points");
    if (opts.substeps < 1 || opts.substeps > 64)
        throw ConfigError("Propagator3LN: substeps must be in [1, 64]");
    freq = derived_frequencies(params);
    const double dt = grid.dt();
    const double theta = freq.omega_sg * dt; // carrier phase per interval
    // the local model needs the carrier resolved; very fine grids (theta -> 0)
    // degrade the basis smoothly into plain cubics and remain fine
    if (theta >= 2.9)
        throw ConfigError("Propagator3LN: grid undersamples the carrier "
                          "(omega_sg*dt = " + std::to_string(theta) + ")");

    const double nodes[3][4] = {{-1.5, -0.5, 0.5, 1.5},
                                {-0.5, 0.5, 1.5, 2.5},
                                {-2.5, -1.5, -0.5, 0.5}};
    for (int sten = 0; sten < 3; ++sten) {
        Eigen::Matrix4d m;
        for (int r = 0; r < 4; ++r) {
            const double x = nodes[sten][r];
            m(r, 0) = std::cos(theta * x);
            m(r, 1) = -std::sin(theta * x);
            m(r, 2) = x * std::cos(theta * x);
            m(r, 3) = -x * std::sin(theta * x);
        }
        const Eigen::Matrix4d inv = m.inverse();
        for (int c = 0; c < 4; ++c) {
            brow[sten][c] = cd(inv(0, c), inv(1, c));
            crow[sten][c] = cd(inv(2, c), inv(3, c));
        }
    }

    const int m = opts.substeps;
    const double scale = 0.5 * freq.mu_d * dt;
    const double wp_sg = 2.0 * freq.omega_sg * dt;
    const double wp_es = (freq.omega_es + freq.omega_sg) * dt;
    const double wm_es = (freq.omega_es - freq.omega_sg) * dt;
    w0_sg.resize(m); w1_sg.resize(m); v0_sg.resize(m); v1_sg.resize(m);
    w0_es.resize(m); w1_es.resize(m); v0_es.resize(m); v1_es.resize(m);
    for (int s = 0; s < m; ++s) {
        const double x0 = -0.5 + static_cast<double>(s) / m;
        const double x1 = -0.5 + static_cast<double>(s + 1) / m;
        const auto p_sg = oscillatory_moments(wp_sg, x0, x1);
        const auto q_sg = oscillatory_moments(0.0, x0, x1);
        const auto p_es = oscillatory_moments(wp_es, x0, x1);
        const auto q_es = oscillatory_moments(wm_es, x0, x1);
        w0_sg[s] = scale * p_sg.i0; w1_sg[s] = scale * p_sg.i1;
        v0_sg[s] = scale * q_sg.i0; v1_sg[s] = scale * q_sg.i1;
        w0_es[s] = scale * p_es.i0; w1_es[s] = scale * p_es.i1;
        v0_es[s] = scale * q_es.i0; v1_es[s] = scale * q_es.i1;
    }

    const std::int64_t ni = grid.n_steps - 1;
    ph_sg.resize(ni);
    ph_es.resize(ni);
    for (std::int64_t k = 0; k < ni; ++k) {
        const double tm = grid.time(k) + 0.5 * dt;
        ph_sg[k] = std::polar(1.0, freq.omega_sg * tm);
        ph_es[k] = std::polar(1.0, freq.omega_es * tm);
    }
}

Propagator3LN::Propagator3LN(const TimeGrid& grid, const SystemParams& p,
                             PropagationOptions opts)
    : impl_(std::make_unique<Impl>()) {
    impl_->grid = grid;
    impl_->params = p;
    impl_->opts = opts;
    if (opts.stepper == Stepper::magnus) {
        impl_->build();
    } else {
        grid.validate();
        p.validate();
    }
}

Propagator3LN::~Propagator3LN() = default;
Propagator3LN::Propagator3LN(Propagator3LN&&) noexcept = default;
Propagator3LN& Propagator3LN::operator=(Propagator3LN&&) noexcept = default;

const TimeGrid& Propagator3LN::grid() const { return impl_->grid; }
const SystemParams& Propagator3LN::params() const { return impl_->params; }
PropagationOptions Propagator3LN::options() const { return impl_->opts; }

QuantumState Propagator3LN::final_state(const SampledField& f,
                                        const QuantumState& psi0) const {
    check_field(f, impl_->grid);
    const std::int64_t ni = impl_->grid.n_steps - 1;
    cd psi[3] = {psi0(0), psi0(1), psi0(2)};
    if (impl_->opts.stepper == Stepper::magnus) {
        const int m = impl_->opts.substeps;
        cd a[64], b[64];
        for (std::int64_t k = 0; k < ni; ++k) {
            impl_->increments(f.values.data(), k, a, b);
            for (int s = 0; s < m; ++s) apply_arrow_exp(a[s], b[s], psi);
        }
    } else {
        const double dt = impl_->grid.dt();
        const bool midpoint = impl_->opts.stepper == Stepper::midpoint;
        for (std::int64_t k = 0; k < ni; ++k) {
            const double v = midpoint ? 0.5 * (f.values[k] + f.values[k + 1])
                                      : f.values[k];
            apply_lab_exp(impl_->params, v, dt, psi);
        }
    }
    return QuantumState(psi[0], psi[1], psi[2]);
}

QuantumState Propagator3LN::final_state(const SampledField& f,
                                        const QuantumState& psi0,
                                        PopulationHistory& history) const {
    check_field(f, impl_->grid);
    const std::int64_t n = impl_->grid.n_steps;
    history.grid = impl_->grid;
    history.p_g.assign(n, 0.0);
    history.p_s.assign(n, 0.0);
    history.p_e.assign(n, 0.0);
    cd psi[3] = {psi0(0), psi0(1), psi0(2)};
    auto record = [&](std::int64_t j) {
        history.p_g[j] = std::norm(psi[0]);
        history.p_s[j] = std::norm(psi[1]);
        history.p_e[j] = std::norm(psi[2]);
    };
    record(0);
    if (impl_->opts.stepper == Stepper::magnus) {
        const int m = impl_->opts.substeps;
        cd a[64], b[64];
        for (std::int64_t k = 0; k < n - 1; ++k) {
            impl_->increments(f.values.data(), k, a, b);
            for (int s = 0; s < m; ++s) apply_arrow_exp(a[s], b[s], psi);
            record(k + 1);
        }
    } else {
        const double dt = impl_->grid.dt();
        const bool midpoint = impl_->opts.stepper == Stepper::midpoint;
        for (std::int64_t k = 0; k < n - 1; ++k) {
            const double v = midpoint ? 0.5 * (f.values[k] + f.values[k + 1])
                                      : f.values[k];
            apply_lab_exp(impl_->params, v, dt, psi);
            record(k + 1);
        }
    }
    return QuantumState(psi[0], psi[1], psi[2]);
}

GradientResult Propagator3LN::fidelity_gradient(const SampledField& f,
                                                const QuantumState& initial,
                                                const QuantumState& target) const {
    if (impl_->opts.stepper != Stepper::magnus)
        throw UsageError("fidelity_gradient: only available for the magnus stepper");
    check_field(f, impl_->grid);
    const Impl& impl = *impl_;
    const std::int64_t ni = impl.grid.n_steps - 1;
    const int m = impl.opts.substeps;
    const std::size_t total = static_cast<std::size_t>(ni) * m;

    // forward pass: store increments and pre-substep states
    std::vector<cd> av(total), bv(total);
    std::vector<cd> states(3 * (total + 1));
    cd psi[3] = {initial(0), initial(1), initial(2)};
    states[0] = psi[0]; states[1] = psi[1]; states[2] = psi[2];
    std::size_t idx = 0;
    cd a[64], b[64];
    for (std::int64_t k = 0; k < ni; ++k) {
        impl.increments(f.values.data(), k, a, b);
        for (int s = 0; s < m; ++s, ++idx) {
            av[idx] = a[s];
            bv[idx] = b[s];
            apply_arrow_exp(a[s], b[s], psi);
            states[3 * (idx + 1) + 0] = psi[0];
            states[3 * (idx + 1) + 1] = psi[1];
            states[3 * (idx + 1) + 2] = psi[2];
        }
    }
    const cd overlap = std::conj(target(0)) * psi[0] + std::conj(target(1)) * psi[1] +
                       std::conj(target(2)) * psi[2];
    GradientResult out;
    out.fidelity = std::norm(overlap);
    out.grad.assign(impl.grid.n_steps, 0.0);

    // Backward pass; per substep the Frechet derivative of exp(-iM) is
    //   dU = -i (ds M + s dM) + dc M^2 + c (dM M + M dM),
    // with ds = s'(u) du, dc = c'(u) du, du = 2 Re(conj(a) da + conj(b) db).
    cd chi[3] = {target(0), target(1), target(2)};
    const cd overlap_bar = std::conj(overlap);
    cd daw[4][64], dbw[4][64];
    for (std::int64_t k = ni - 1; k >= 0; --k) {
        const std::int64_t base = impl.stencil_base(k);
        for (int col = 0; col < 4; ++col)
            impl.increment_weights(k, col, daw[col], dbw[col]);
        for (int s = m - 1; s >= 0; --s) {
            const std::size_t id = static_cast<std::size_t>(k) * m + s;
            const cd ca = av[id], cb = bv[id];
            const double u = std::norm(ca) + std::norm(cb);
            const auto sc = arrow_coeffs(u);
            double dsu, dcu;
            arrow_coeff_derivs(u, sc, dsu, dcu);
            const cd* ps = &states[3 * id];

            const cd mp0 = std::conj(ca) * ps[1];
            const cd mp1 = ca * ps[0] + std::conj(cb) * ps[2];
            const cd mp2 = cb * ps[1];
            const cd mmp0 = std::conj(ca) * mp1;
            const cd mmp1 = ca * mp0 + std::conj(cb) * mp2;
            const cd mmp2 = cb * mp1;
            const cd mc0 = std::conj(ca) * chi[1];
            const cd mc1 = ca * chi[0] + std::conj(cb) * chi[2];
            const cd mc2 = cb * chi[1];

            const cd A0 = std::conj(chi[0]) * mp0 + std::conj(chi[1]) * mp1 +
                          std::conj(chi[2]) * mp2;
            const cd B0 = std::conj(chi[0]) * mmp0 + std::conj(chi[1]) * mmp1 +
                          std::conj(chi[2]) * mmp2;

            // <u|dM|w> = da*pa + conj(da)*qa + db*pb + conj(db)*qb
            const cd pa1 = std::conj(chi[1]) * ps[0], qa1 = std::conj(chi[0]) * ps[1];
            const cd pb1 = std::conj(chi[2]) * ps[1], qb1 = std::conj(chi[1]) * ps[2];
            const cd pa2 = std::conj(chi[1]) * mp0, qa2 = std::conj(chi[0]) * mp1;
            const cd pb2 = std::conj(chi[2]) * mp1, qb2 = std::conj(chi[1]) * mp2;
            const cd pa3 = std::conj(mc1) * ps[0], qa3 = std::conj(mc0) * ps[1];
            const cd pb3 = std::conj(mc2) * ps[1], qb3 = std::conj(mc1) * ps[2];

            for (int col = 0; col < 4; ++col) {
                const cd dA = daw[col][s], dB = dbw[col][s];
                const cd dAc = std::conj(dA), dBc = std::conj(dB);
                const cd sdm = dA * pa1 + dAc * qa1 + dB * pb1 + dBc * qb1;
                const cd sdm_m = dA * pa2 + dAc * qa2 + dB * pb2 + dBc * qb2;
                const cd m_sdm = dA * pa3 + dAc * qa3 + dB * pb3 + dBc * qb3;
                const double du = 2.0 * (std::conj(ca) * dA + std::conj(cb) * dB).real();
                const cd dUval = cd(0.0, -1.0) * (dsu * du * A0 + sc.s * sdm) +
                                 dcu * du * B0 + sc.c * (sdm_m + m_sdm);
                out.grad[base + col] += 2.0 * (overlap_bar * dUval).real();
            }

            // chi <- exp(+iM) chi
            const cd is(0.0, sc.s);
            chi[0] += is * mc0 + sc.c * (std::conj(ca) * mc1);
            chi[1] += is * mc1 + sc.c * (ca * mc0 + std::conj(cb) * mc2);
            chi[2] += is * mc2 + sc.c * (cb * mc1);
        }
    }
    return out;
}

QuantumState propagate_3ln(const SampledField& f, const SystemParams& p,
                           const QuantumState& psi0, PropagationOptions opts) {
    return Propagator3LN(f.grid, p, opts).final_state(f, psi0);
}

QuantumState propagate_3ln(const SampledField& f, const SystemParams& p,
                           const QuantumState& psi0, PopulationHistory& history,
                           PropagationOptions opts) {
    return Propagator3LN(f.grid, p, opts).final_state(f, psi0, history);
}

namespace {

QuantumState magnus_state(cd theta_sg, cd theta_es, const QuantumState& psi0) {
    cd psi[3] = {psi0(0), psi0(1), psi0(2)};
    apply_arrow_exp(-theta_sg, -theta_es, psi);
    return QuantumState(psi[0], psi[1], psi[2]);
}

} // namespace

QuantumState propagate_3la(const SampledField& f, const SystemParams& p,
                           const QuantumState& psi0) {
    const auto areas = pulse_areas(f, p);
    return magnus_state(areas.theta_sg, areas.theta_es, psi0);
}

QuantumState propagate_3la(const SampledField& f, const SystemParams& p,
                           const QuantumState& psi0, PopulationHistory& history) {
    std::vector<cd> tsg, tes;
    cumulative_areas(f, p, tsg, tes);
    const std::int64_t n = f.grid.n_steps;
    history.grid = f.grid;
    history.p_g.assign(n, 0.0);
    history.p_s.assign(n, 0.0);
    history.p_e.assign(n, 0.0);
    QuantumState last;
    for (std::int64_t j = 0; j < n; ++j) {
        last = magnus_state(tsg[j], tes[j], psi0);
        history.p_g[j] = std::norm(last(0));
        history.p_s[j] = std::norm(last(1));
        history.p_e[j] = std::norm(last(2));
    }
    return last;
}

PopulationHistory propagate_2la(const SampledField& f, const SystemParams& p) {
    std::vector<cd> tsg, tes;
    cumulative_areas(f, p, tsg, tes);
    const std::int64_t n = f.grid.n_steps;
    PopulationHistory h;
    h.grid = f.grid;
    h.p_g.assign(n, 0.0);
    h.p_s.assign(n, 0.0);
    h.p_e.assign(n, 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
        const double th = std::abs(tsg[j]);
        const double ps = std::sin(th) * std::sin(th);
        h.p_s[j] = ps;
        h.p_g[j] = 1.0 - ps;
    }
    return h;
}

GradientResult fidelity_gradient(const SampledField& f, const SystemParams& p,
                                 const QuantumState& initial,
                                 const QuantumState& target, int substeps) {
    PropagationOptions opts;
    opts.stepper = Stepper::magnus;
    opts.substeps = substeps;
    Propagator3LN prop(f.grid, p, opts);
    return prop.fidelity_gradient(f, initial, target);
}

void write_history_csv(const PopulationHistory& h, const std::string& path) {
    auto out = csv::open_out(path);
    out << "t_fs,p_g,p_s,p_e\n";
    for (std::int64_t j = 0; j < h.grid.n_steps; ++j)
        out << csv::format(units::au_to_femtosecond(h.grid.time(j))) << ','
            << csv::format(h.p_g[j]) << ',' << csv::format(h.p_s[j]) << ','
            << csv::format(h.p_e[j]) << '\n';
}

ModelKind parse_model(const std::string& s) {
    if (s == "3ln") return ModelKind::three_level_numeric;
    if (s == "3la") return ModelKind::three_level_magnus;
    if (s == "2la") return ModelKind::two_level_analytic;
    throw ConfigError("unknown model: " + s + " (expected 3ln, 3la, or 2la)");
}

std::string model_name(ModelKind m) {
    switch (m) {
    case ModelKind::three_level_numeric: return "3ln";
    case ModelKind::three_level_magnus: return "3la";
    case ModelKind::two_level_analytic: return "2la";
    }
    return "?";
}

Stepper parse_stepper(const std::string& s) {
    if (s == "magnus") return Stepper::magnus;
    if (s == "midpoint") return Stepper::midpoint;
    if (s == "paper") return Stepper::paper;
    throw ConfigError("unknown stepper: " + s);
}

} // namespace rydopt
