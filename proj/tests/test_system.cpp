#include <doctest.h>

#include <cmath>
#include <complex>

#include "rydopt/system.hpp"

using namespace rydopt;

TEST_CASE("degenerate ladder: vdd -> 0 limit") {
    SystemParams p;
    p.omega0 = 1.0;
    p.mu = 1.0;
    p.vdd = 1e-300; // ~0 while satisfying positivity
    const auto d = derived_frequencies(p);
    CHECK(d.omega_sg == doctest::Approx(1.0));
    CHECK(d.omega_es == doctest::Approx(1.0));
}

TEST_CASE("paper parameters give the quoted transition frequencies") {
    const SystemParams p = SystemParams::paper();
    const auto d = derived_frequencies(p);
    CHECK(units::au_to_wavenumber(d.omega_sg) == doctest::Approx(12591.30).epsilon(1e-12));
    CHECK(units::au_to_wavenumber(d.omega_es) == doctest::Approx(12566.60).epsilon(1e-12));
    // mu_d = sqrt(2) * 7.61 debye = 10.76216520965925 debye
    CHECK(units::from_atomic(d.mu_d, units::Unit::debye).value ==
          doctest::Approx(10.76216520965925483).epsilon(1e-12));
}

TEST_CASE("frequency sum and difference identities") {
    const SystemParams p = SystemParams::paper();
    const auto d = derived_frequencies(p);
    CHECK(d.omega_sg + d.omega_es == doctest::Approx(2.0 * p.omega0).epsilon(1e-15));
    CHECK(d.omega_sg - d.omega_es == doctest::Approx(2.0 * p.vdd).epsilon(1e-12));
}

TEST_CASE("hamiltonian structure") {
    const SystemParams p = SystemParams::paper();

    SUBCASE("field-free limit is diagonal") {
        const auto h = build_hamiltonian(p, 0.0);
        CHECK(h(0, 0) == -p.omega0);
        CHECK(h(1, 1) == p.vdd);
        CHECK(h(2, 2) == p.omega0);
        CHECK(h(0, 1) == 0.0);
        CHECK(h(1, 2) == 0.0);
    }
    SUBCASE("coupling entries are -mu_d field") {
        const double field = 3.7e-5;
        const auto h = build_hamiltonian(p, field);
        const double expected = -std::sqrt(2.0) * p.mu * field;
        CHECK(h(0, 1) == expected);
        CHECK(h(1, 0) == expected);
        CHECK(h(1, 2) == expected);
        CHECK(h(2, 1) == expected);
    }
    SUBCASE("no direct g-e coupling, exact symmetry") {
        for (double field : {-2e-4, 0.0, 5e-6, 1e-3}) {
            const auto h = build_hamiltonian(p, field);
            CHECK(h(0, 2) == 0.0);
            CHECK(h(2, 0) == 0.0);
            CHECK(h(0, 1) == h(1, 0));
            CHECK(h(1, 2) == h(2, 1));
        }
    }
    SUBCASE("non-finite field is rejected") {
        CHECK_THROWS_AS(build_hamiltonian(p, std::nan("")), PropagationError);
    }
}

TEST_CASE("bell fidelity") {
    CHECK(bell_fidelity(bell_state()) == doctest::Approx(1.0));
    CHECK(bell_fidelity(ground_state()) == doctest::Approx(0.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(bell_fidelity(QuantumState(r, r, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("bell fidelity is invariant under a global phase") {
    QuantumState psi(std::complex<double>(0.3, 0.1),
                     std::complex<double>(0.5, -0.4),
                     std::complex<double>(0.2, 0.67));
    psi.normalize();
    const double f0 = bell_fidelity(psi);
    for (double phase : {0.3, 1.7, -2.4}) {
        const QuantumState rotated = std::polar(1.0, phase) * psi;
        CHECK(bell_fidelity(rotated) == doctest::Approx(f0).epsilon(1e-14));
    }
}

TEST_CASE("parameter validation") {
    SystemParams p = SystemParams::paper();
    p.vdd = p.omega0 * 2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SystemParams::paper();
    p.mu = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
