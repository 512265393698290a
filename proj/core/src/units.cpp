#include "rydopt/units.hpp"

namespace rydopt::units {

using namespace constants;

double to_atomic(const Quantity& q) {
    switch (q.unit) {
    case Unit::wavenumber_cm: return q.value / wavenumber_per_hartree;
    case Unit::femtosecond: return q.value / atomic_time_fs;
    case Unit::debye: return q.value * atomic_dipole_per_debye;
    case Unit::atomic_energy:
    case Unit::atomic_time:
    case Unit::atomic_dipole:
    case Unit::dimensionless: return q.value;
    }
    throw ConfigError("to_atomic: unknown unit tag");
}

Quantity from_atomic(double value, Unit unit) {
    switch (unit) {
    case Unit::wavenumber_cm: return {value * wavenumber_per_hartree, unit};
    case Unit::femtosecond: return {value * atomic_time_fs, unit};
    case Unit::debye: return {value / atomic_dipole_per_debye, unit};
    case Unit::atomic_energy:
    case Unit::atomic_time:
    case Unit::atomic_dipole:
    case Unit::dimensionless: return {value, unit};
    }
    throw ConfigError("from_atomic: unknown unit tag");
}

double wavenumber_to_au(double cm1) { return cm1 / wavenumber_per_hartree; }
double femtosecond_to_au(double fs) { return fs / atomic_time_fs; }
double debye_to_au(double d) { return d * atomic_dipole_per_debye; }
double au_to_femtosecond(double t) { return t * atomic_time_fs; }
double au_to_wavenumber(double e) { return e * wavenumber_per_hartree; }

Unit parse_unit(const std::string& name) {
    if (name == "cm-1" || name == "wavenumber_cm") return Unit::wavenumber_cm;
    if (name == "fs" || name == "femtosecond") return Unit::femtosecond;
    if (name == "debye" || name == "D") return Unit::debye;
    if (name == "hartree" || name == "atomic_energy") return Unit::atomic_energy;
    if (name == "atomic_time") return Unit::atomic_time;
    if (name == "atomic_dipole") return Unit::atomic_dipole;
    if (name == "1" || name == "dimensionless") return Unit::dimensionless;
    throw ConfigError("unknown unit: " + name);
}

std::string unit_name(Unit u) {
    switch (u) {
    case Unit::wavenumber_cm: return "cm-1";
    case Unit::femtosecond: return "fs";
    case Unit::debye: return "debye";
    case Unit::atomic_energy: return "atomic_energy";
    case Unit::atomic_time: return "atomic_time";
    case Unit::atomic_dipole: return "atomic_dipole";
    case Unit::dimensionless: return "dimensionless";
    }
    return "?";
}

} // namespace rydopt::units
