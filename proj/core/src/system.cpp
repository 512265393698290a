#include "rydopt/system.hpp"

#include <cmath>

namespace rydopt {

SystemParams SystemParams::paper() {
    SystemParams p;
    p.omega0 = units::wavenumber_to_au(12578.95);
    p.mu = units::debye_to_au(7.61);
    p.vdd = units::wavenumber_to_au(12.35);
    return p;
}

DerivedFrequencies derived_frequencies(const SystemParams& p) {
    DerivedFrequencies d;
    d.omega_sg = p.omega0 + p.vdd; // E_s - E_g
    d.omega_es = p.omega0 - p.vdd; // E_e - E_s
    d.mu_d = std::sqrt(2.0) * p.mu;
    return d;
}

Eigen::Matrix3d build_hamiltonian(const SystemParams& p, double field_value) {
    if (!std::isfinite(field_value))
        throw PropagationError("build_hamiltonian: non-finite field value");
    const double c = -std::sqrt(2.0) * p.mu * field_value;
    Eigen::Matrix3d h;
    h << p.energy_g(), c, 0.0,
         c, p.energy_s(), c,
         0.0, c, p.energy_e();
    return h;
}

Eigen::Matrix3d dipole_matrix(const SystemParams& p) {
    const double mu_d = std::sqrt(2.0) * p.mu;
    Eigen::Matrix3d m;
    m << 0.0, mu_d, 0.0,
         mu_d, 0.0, mu_d,
         0.0, mu_d, 0.0;
    return m;
}

double bell_fidelity(const QuantumState& psi) {
    return std::norm(psi(1));
}

} // namespace rydopt
