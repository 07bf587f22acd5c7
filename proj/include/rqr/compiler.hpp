#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rqr/dispersive.hpp"
#include "rqr/fock.hpp"
#include "rqr/gates.hpp"
#include "rqr/schedule.hpp"

namespace rqr {

// Coefficients c(n_a, n_b) of the resonator state; N_a, N_b are the largest photon
// numbers carrying a nonzero coefficient.
class TargetSpec {
public:
    // Normalizes; `normalized` reports whether rescaling by more than 1e-9 happened.
    explicit TargetSpec(Eigen::MatrixXcd coefficients, std::string label = "general");

    const Eigen::MatrixXcd& coefficients() const { return c_; }
    cplx coefficient(int na, int nb) const;
    int N_a() const { return N_a_; }
    int N_b() const { return N_b_; }
    const std::string& label() const { return label_; }
    bool was_renormalized() const { return renormalized_; }

    // |0> (x) |Psi> in the given space.
    StateVector embed(const HilbertSpace& space) const;

private:
    Eigen::MatrixXcd c_;
    int N_a_ = 0;
    int N_b_ = 0;
    std::string label_;
    bool renormalized_ = false;
};

TargetSpec make_general_target(const Eigen::MatrixXcd& coefficients);
TargetSpec make_max_entangled_target(int N);
TargetSpec make_noon_target(int N_a, int N_b);

// Dense random coefficients (every entry nonzero). Real targets use real Gaussians.
TargetSpec make_random_target(int N_a, int N_b, std::mt19937_64& rng, bool real_only = false);

struct GateCounts {
    int a = 0;
    int b = 0;
    int r = 0;
    int total() const { return a + b + r; }
};

struct Correction {
    int j;  // row (n_b) of the B stage, or 0 for the A stage
    int k;  // column (n_a)
};

struct CompileStats {
    std::vector<Correction> corrections;
    double inverse_residual = 0.0;   // weight left off |0,0,0> after the inverse sequence
    double forward_fidelity = 0.0;   // forward sequence on |0,0,0> against the target
    double excited_amplitude = 0.0;  // qubit-excited norm of the forward result
};

struct GateSequence {
    std::string path;  // "general", "noon" or "empty"
    int N_a = 0;
    int N_b = 0;
    std::vector<GateDescriptor> gates;
    // snapshots[0] = |0,0,0>, snapshots[i + 1] = state after gates[i].
    std::vector<StateVector> snapshots;
    CompileStats stats;
    double relative_phase = 0.0;  // NOON path: phase of the (0, N_b) branch relative to (N_a, 0)

    GateCounts counts() const;
};

struct CompileOptions {
    double residual_tolerance = 1e-9;
    double alignment_tolerance = 1e-12;
    int max_corrections_per_node = 3;
    int guard = 2;
};

GateSequence compile_general(const TargetSpec& target, const SystemParams& p, const CompileOptions& opts = {});
GateSequence compile_noon(int N_a, int N_b, const SystemParams& p, double relative_phase = 0.0,
                          const CompileOptions& opts = {});
// Dispatches NOON-shaped targets (two equal-weight corner coefficients) to the linear
// path and everything else to compile_general.
GateSequence compile_target(const TargetSpec& target, const SystemParams& p, const CompileOptions& opts = {});

// Runs the gates on |0,0,0> and records snapshots.
std::vector<StateVector> apply_sequence(const std::vector<GateDescriptor>& gates, const HilbertSpace& space);

double estimate_duration_general(int N_a, int N_b, const SystemParams& p);
double estimate_duration_noon(int N_a, int N_b, const SystemParams& p);
// Sum of the physical gate durations, excluding shift overhead.
double gate_time(const std::vector<GateDescriptor>& gates, const SystemParams& p);

struct LoweringOptions {
    double ramp = 1e-9;              // shift ramp time (s); 0 is the sudden limit
    bool frame_compensation = true;  // emit VirtualPhase corrections
    bool skip_identity = true;       // drop zero-angle gates
    // Drive each R at the exact dressed transition of the most populated node on its
    // diagonal instead of the second-order ladder frequency.
    bool dressed_drive = false;
    // Cancel the phase each Rabi pulse leaves on basis states off its diagonal (drive
    // light shift), read from the exact pulse propagator.
    bool calibrate_spectators = false;
};

PulseSchedule lower_schedule(const GateSequence& seq, const SystemParams& p, const LoweringOptions& opts = {});

// Records "n_a n_b re im".
void write_target(std::ostream& out, const TargetSpec& t);
TargetSpec read_target(std::istream& in);

// Records "kind theta_rad phi_rad n snapshot_hash".
void write_gate_sequence(std::ostream& out, const GateSequence& seq);
// FNV-1a over amplitudes rounded to 1e-9.
std::uint64_t snapshot_hash(const StateVector& psi);

}  // namespace rqr
