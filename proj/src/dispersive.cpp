#include "rqr/dispersive.hpp"

#include <cmath>
#include <cstdio>

#include "rqr/errors.hpp"
#include "rqr/units.hpp"

namespace rqr {

using namespace units;

SystemParams reference_params(int na_max, int nb_max) {
    SystemParams p;
    p.omega_a = ghz(6.3);
    p.omega_b = ghz(7.7);
    p.omega_q = ghz(7.0);
    p.g_a = mhz(70);
    p.g_b = mhz(70);
    p.Omega = mhz(7);
    p.na_max = na_max;
    p.nb_max = nb_max;
    return p;
}

SystemParams estimate_params(int na_max, int nb_max) {
    SystemParams p;
    p.omega_a = ghz(6.0);
    p.omega_b = ghz(7.0);
    p.omega_q = ghz(6.5);
    p.g_a = mhz(150);
    p.g_b = mhz(150);
    p.Omega = mhz(22);
    p.na_max = na_max;
    p.nb_max = nb_max;
    return p;
}

namespace {

void require_detuned(const SystemParams& p) {
    if (p.omega_q == p.omega_a) throw SingularityError("qubit degenerate with resonator A");
    if (p.omega_q == p.omega_b) throw SingularityError("qubit degenerate with resonator B");
}

}  // namespace

DeltaOmega delta_omega(const SystemParams& p) {
    require_detuned(p);
    const double a_side = 2.0 * p.g_a * p.g_a / (p.omega_q - p.omega_a);
    const double b_side = 2.0 * p.g_b * p.g_b / (p.omega_b - p.omega_q);
    return {a_side, std::abs(a_side - b_side)};
}

double matched_qubit_frequency(double omega_a, double omega_b, double g_a, double g_b) {
    if (!(omega_a < omega_b)) throw PreconditionError("matched_qubit_frequency needs omega_a < omega_b");
    const double wa = g_a * g_a;
    const double wb = g_b * g_b;
    if (wa + wb == 0.0) throw SingularityError("both couplings vanish");
    return (wa * omega_b + wb * omega_a) / (wa + wb);
}

double drive_frequency(const SystemParams& p, int na, int nb) {
    require_detuned(p);
    return p.omega_q + p.g_a * p.g_a / (p.omega_q - p.omega_a) * (2.0 * na + 1.0) +
           p.g_b * p.g_b / (p.omega_q - p.omega_b) * (2.0 * nb + 1.0);
}

double diagonal_frequency(const SystemParams& p, int n, double rel_tol) {
    const DeltaOmega d = delta_omega(p);
    if (d.mismatch > rel_tol * std::abs(d.value)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "matching condition violated: mismatch %.3e > %.1e * delta_omega",
                      d.mismatch, rel_tol);
        throw PreconditionError(buf);
    }
    return p.omega_q + n * d.value;
}

AmplitudeBound max_selective_amplitude(const SystemParams& p) {
    require_detuned(p);
    const double recommended = p.g_a * p.g_a / (p.omega_q - p.omega_a) / 2.0;
    const double hard = std::abs(delta_omega(p).value) / 2.0;
    return {recommended, hard, p.Omega > hard * (1.0 + 1e-12)};
}

DispersiveValidity dispersive_validity(const SystemParams& p) {
    require_detuned(p);
    const double ra = p.g_a / std::abs(p.omega_q - p.omega_a);
    const double rb = p.g_b / std::abs(p.omega_b - p.omega_q);
    return {ra, rb, ra < kDispersiveRatioLimit && rb < kDispersiveRatioLimit};
}

std::vector<std::string> validate_params(const SystemParams& p) {
    if (!(p.omega_a < p.omega_q && p.omega_q < p.omega_b))
        throw ConfigError("parameters must satisfy omega_a < omega_q < omega_b");
    if (!(p.g_a > 0.0 && p.g_b > 0.0)) throw ConfigError("couplings g_a, g_b must be positive");
    if (p.Omega < 0.0) throw ConfigError("drive amplitude Omega must be non-negative");
    if (p.na_max < 0 || p.nb_max < 0) throw ConfigError("cutoffs must be non-negative");

    std::vector<std::string> warnings;
    char buf[200];
    for (double w : {p.omega_a, p.omega_b, p.omega_q}) {
        if (to_ghz(w) < 0.1 || to_ghz(w) > 20.0) {
            std::snprintf(buf, sizeof buf, "frequency %.6g GHz outside the [0.1, 20] GHz sanity range", to_ghz(w));
            warnings.emplace_back(buf);
        }
    }
    const DispersiveValidity v = dispersive_validity(p);
    if (!v.valid) {
        std::snprintf(buf, sizeof buf, "dispersive ratios g/detuning = (%.3f, %.3f) reach %.1f",
                      v.ratio_a, v.ratio_b, kDispersiveRatioLimit);
        warnings.emplace_back(buf);
    }
    const DeltaOmega d = delta_omega(p);
    if (d.mismatch > kMismatchTolerance * std::abs(d.value)) {
        std::snprintf(buf, sizeof buf, "matching condition mismatch %.4g MHz (delta_omega %.4g MHz)",
                      to_mhz(d.mismatch), to_mhz(d.value));
        warnings.emplace_back(buf);
    }
    const AmplitudeBound ab = max_selective_amplitude(p);
    if (ab.exceeded) {
        std::snprintf(buf, sizeof buf, "Omega %.4g MHz exceeds the selectivity bound %.4g MHz",
                      to_mhz(p.Omega), to_mhz(ab.hard_bound));
        warnings.emplace_back(buf);
    }
    return warnings;
}

}  // namespace rqr
