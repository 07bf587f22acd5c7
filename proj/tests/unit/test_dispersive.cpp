#include <doctest.h>

#include <cmath>

#include "rqr/dispersive.hpp"
#include "rqr/errors.hpp"
#include "rqr/units.hpp"

using namespace rqr;
using namespace rqr::units;

TEST_CASE("reference parameters give a 14 MHz ladder spacing") {
    const SystemParams p = reference_params();
    const DeltaOmega d = delta_omega(p);
    // 2 g^2 / detuning = 2 * 70^2 / 700 MHz
    CHECK(to_mhz(d.value) == doctest::Approx(14.0).epsilon(1e-12));
    CHECK(d.mismatch < 1e-9 * d.value);
}

TEST_CASE("a 1% coupling error shows up as a ~2% mismatch") {
    SystemParams p = reference_params();
    p.g_b *= 1.01;
    const DeltaOmega d = delta_omega(p);
    CHECK(d.mismatch / d.value == doctest::Approx(0.0201).epsilon(1e-9));
    CHECK_THROWS_AS(diagonal_frequency(p, 1), PreconditionError);
    CHECK_NOTHROW(diagonal_frequency(p, 1, 0.05));
}

TEST_CASE("matched qubit frequency") {
    // Symmetric couplings put the qubit midway.
    CHECK(matched_qubit_frequency(ghz(6.3), ghz(7.7), mhz(70), mhz(70)) == doctest::Approx(ghz(7.0)));
    // g_a = 2 g_b: 4 / (w_q - w_a) = 1 / (w_b - w_q) -> w_q = (4 w_b + w_a) / 5.
    const double wq = matched_qubit_frequency(ghz(6.0), ghz(8.0), mhz(100), mhz(50));
    CHECK(wq == doctest::Approx((4 * ghz(8.0) + ghz(6.0)) / 5).epsilon(1e-14));
    SystemParams p = reference_params();
    p.g_a = mhz(100);
    p.g_b = mhz(50);
    p.omega_q = matched_qubit_frequency(p.omega_a, p.omega_b, p.g_a, p.g_b);
    CHECK(delta_omega(p).mismatch < 1e-9 * delta_omega(p).value);
}

TEST_CASE("drive frequencies at the reference point") {
    const SystemParams p = reference_params();
    // w_q + (2 n_a + 1) 7 MHz - (2 n_b + 1) 7 MHz
    CHECK(to_ghz(drive_frequency(p, 2, 0)) == doctest::Approx(7.028).epsilon(1e-12));
    CHECK(to_ghz(drive_frequency(p, 0, 1)) == doctest::Approx(6.986).epsilon(1e-12));
    CHECK(to_ghz(diagonal_frequency(p, 2)) == doctest::Approx(7.028).epsilon(1e-12));
    CHECK(to_ghz(diagonal_frequency(p, -1)) == doctest::Approx(6.986).epsilon(1e-12));
}

TEST_CASE("drive frequency is monotone in each photon number") {
    const SystemParams p = estimate_params();
    for (int n = 0; n < 6; ++n) {
        CHECK(drive_frequency(p, n + 1, 2) > drive_frequency(p, n, 2));
        CHECK(drive_frequency(p, 2, n + 1) < drive_frequency(p, 2, n));
    }
}

TEST_CASE("amplitude bounds") {
    const AmplitudeBound e = max_selective_amplitude(estimate_params());
    // 150^2 / 500 / 2 MHz
    CHECK(to_mhz(e.recommended) == doctest::Approx(22.5).epsilon(1e-12));
    CHECK_FALSE(e.exceeded);
    const AmplitudeBound f = max_selective_amplitude(reference_params());
    CHECK(to_mhz(f.hard_bound) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(to_mhz(f.recommended) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK_FALSE(f.exceeded);
    SystemParams g = reference_params();
    g.Omega = mhz(7.5);
    CHECK(max_selective_amplitude(g).exceeded);
}

TEST_CASE("dispersive validity ratio") {
    const DispersiveValidity v = dispersive_validity(reference_params());
    CHECK(v.ratio_a == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(v.valid);
    SystemParams p = reference_params();
    p.g_a = mhz(250);
    CHECK_FALSE(dispersive_validity(p).valid);
}

TEST_CASE("parameter validation") {
    CHECK(validate_params(reference_params()).empty());
    SystemParams p = reference_params();
    p.omega_q = p.omega_a - mhz(10);
    CHECK_THROWS_AS(validate_params(p), ConfigError);
    p = reference_params();
    p.g_a = -1.0;
    CHECK_THROWS_AS(validate_params(p), ConfigError);
    p = reference_params();
    p.Omega = mhz(9);
    CHECK_FALSE(validate_params(p).empty());
}
