#pragma once

#include <string>
#include <vector>

#include "rqr/fock.hpp"

namespace rqr {

// All frequencies and couplings in rad/s.
struct SystemParams {
    double omega_a = 0.0;
    double omega_b = 0.0;
    double omega_q = 0.0;  // parked (dispersive) qubit frequency
    double g_a = 0.0;
    double g_b = 0.0;
    double Omega = 0.0;
    int na_max = 5;
    int nb_max = 5;

    HilbertSpace space() const { return HilbertSpace(na_max, nb_max); }
};

// 6.3 / 7.7 / 7 GHz, g = 70 MHz, Omega = 7 MHz.
SystemParams reference_params(int na_max = 5, int nb_max = 5);
// 6 / 7 / 6.5 GHz, g = 150 MHz, Omega = 22 MHz.
SystemParams estimate_params(int na_max = 10, int nb_max = 10);

struct DeltaOmega {
    double value;     // 2 g_a^2 / (w_q - w_a)
    double mismatch;  // |value - 2 g_b^2 / (w_b - w_q)|
};

DeltaOmega delta_omega(const SystemParams& p);

double matched_qubit_frequency(double omega_a, double omega_b, double g_a, double g_b);

double drive_frequency(const SystemParams& p, int na, int nb);

inline constexpr double kMismatchTolerance = 1e-3;

double diagonal_frequency(const SystemParams& p, int n, double rel_tol = kMismatchTolerance);

struct AmplitudeBound {
    double recommended;  // g_a^2 / (w_q - w_a) / 2
    double hard_bound;   // delta_omega / 2
    bool exceeded;       // p.Omega > hard_bound
};

AmplitudeBound max_selective_amplitude(const SystemParams& p);

inline constexpr double kDispersiveRatioLimit = 0.3;

struct DispersiveValidity {
    double ratio_a;
    double ratio_b;
    bool valid;
};

DispersiveValidity dispersive_validity(const SystemParams& p);

// Throws ConfigError on violated hard invariants; returns warnings for soft ones.
std::vector<std::string> validate_params(const SystemParams& p);

}  // namespace rqr
