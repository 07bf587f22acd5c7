#pragma once

#include <vector>

#include "rqr/fock.hpp"
#include "rqr/schedule.hpp"

namespace rqr {

enum class PropagationMode { Idealized, Full };

struct PropagationOptions {
    // RK4 step on ramps is 1 / (ramp_step_factor * rho), rho a Gershgorin bound of H.
    double ramp_step_factor = 100.0;
    double norm_tolerance = 1e-6;
    // Relative tolerance when checking that a segment finds the qubit where it needs it.
    double frequency_tolerance = 1e-6;
};

struct PropagationResult {
    StateVector final_state;
    // trajectory[0] is the input, trajectory[i + 1] the state after segment i.
    std::vector<StateVector> trajectory;
};

// Full mode reports states in the idle frame of H_ref = w_park|1><1| + w_a a'a + w_b b'b
// (w_park = params.omega_q), with time measured from the start of the schedule.
// Idealized mode maps shifts and virtual phases to identity, ResonantA/B to the
// ideal A/B gates and each Rabi segment to the R gate on the diagonal its drive selects.
PropagationResult propagate_schedule(const PulseSchedule& sched, const StateVector& psi0, PropagationMode mode,
                                     const PropagationOptions& opts = {});

// Fixed-step RK4 for the qubit frequency ramping linearly from w_start to w_end over
// `duration`, in the frame rotating at `frame_omega`. Constant H when w_start == w_end.
StateVector rk4_ramp(const SystemParams& p, double w_start, double w_end, double duration, double frame_omega,
                     const StateVector& psi, double step_factor = 100.0);

}  // namespace rqr
