#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rydopt/errors.hpp"
#include "rydopt/units.hpp"

namespace rydopt {

// Two-atom Dicke-basis three-level ladder {|g>, |s>, |e>}; the antisymmetric
// state decouples and is excluded from the state vector. The physical field
// is real and the dynamics run in the lab frame (no rotating-wave step).
struct SystemParams {
    double omega0 = 0.0; // single-atom transition energy (a.u.)
    double mu = 0.0;     // single-atom dipole (a.u.)
    double vdd = 0.0;    // dipole-dipole shift (a.u.)

    void validate() const {
        if (!(omega0 > 0.0) || !(mu > 0.0) || !(vdd > 0.0))
            throw ConfigError("SystemParams: omega0, mu, vdd must be positive");
        if (!(vdd < omega0))
            throw ConfigError("SystemParams: vdd < omega0 required for ladder ordering");
    }

    static SystemParams paper();

    double energy_g() const { return -omega0; }
    double energy_s() const { return vdd; }
    double energy_e() const { return omega0; }
    double energy_a() const { return -vdd; } // decoupled, recorded only
};

struct DerivedFrequencies {
    double omega_sg = 0.0;
    double omega_es = 0.0;
    double mu_d = 0.0;
};

using QuantumState = Eigen::Vector3cd; // amplitudes (c_g, c_s, c_e)

DerivedFrequencies derived_frequencies(const SystemParams& p);

// H = diag(E_g, E_s, E_e) - mu_d * field * (|g><s| + |s><g| + |s><e| + |e><s|)
Eigen::Matrix3d build_hamiltonian(const SystemParams& p, double field_value);

// dipole coupling matrix of the drive term (entries mu_d on the ladder)
Eigen::Matrix3d dipole_matrix(const SystemParams& p);

double bell_fidelity(const QuantumState& psi);

inline QuantumState ground_state() { return QuantumState(1.0, 0.0, 0.0); }
inline QuantumState bell_state() { return QuantumState(0.0, 1.0, 0.0); }

} // namespace rydopt
