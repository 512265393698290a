#pragma once

#include <numbers>
#include <string>

#include "rydopt/errors.hpp"

namespace rydopt::units {

// All dynamics run in atomic units (hbar = 1). Conversions happen once, at
// configuration boundaries. Factors are derived from CODATA 2018 constants.
namespace constants {
inline constexpr double hartree_joule = 4.3597447222071e-18;
inline constexpr double planck_joule_s = 6.62607015e-34;       // exact
inline constexpr double light_speed_m_s = 299792458.0;         // exact
inline constexpr double elementary_charge_coulomb = 1.602176634e-19; // exact
inline constexpr double bohr_radius_m = 5.29177210903e-11;

// 1 hartree expressed in cm^-1: E_h / (h c), c in cm/s.  219474.6313632
inline constexpr double wavenumber_per_hartree =
    hartree_joule / (planck_joule_s * light_speed_m_s * 100.0);

// atomic unit of time, hbar/E_h = 2.4188843265857e-17 s
inline constexpr double atomic_time_s =
    planck_joule_s / (2.0 * std::numbers::pi * hartree_joule);
inline constexpr double atomic_time_fs = atomic_time_s * 1e15;

// 1 debye = 1e-21/c C m ; atomic dipole unit = e a0
inline constexpr double debye_coulomb_m = 1e-21 / light_speed_m_s;
inline constexpr double atomic_dipole_coulomb_m =
    elementary_charge_coulomb * bohr_radius_m;
inline constexpr double atomic_dipole_per_debye =
    debye_coulomb_m / atomic_dipole_coulomb_m;
} // namespace constants

enum class Unit {
    wavenumber_cm,
    femtosecond,
    debye,
    atomic_energy,
    atomic_time,
    atomic_dipole,
    dimensionless,
};

struct Quantity {
    double value = 0.0;
    Unit unit = Unit::dimensionless;
};

double to_atomic(const Quantity& q);
Quantity from_atomic(double value, Unit unit);

double wavenumber_to_au(double cm1);
double femtosecond_to_au(double fs);
double debye_to_au(double d);
double au_to_femtosecond(double t);
double au_to_wavenumber(double e);

Unit parse_unit(const std::string& name);
std::string unit_name(Unit u);

} // namespace rydopt::units
