#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rqr/dispersive.hpp"
#include "rqr/fock.hpp"

namespace rqr {

// Linear ramp of the qubit frequency to `target` over `ramp`, then `hold` at target.
struct Shift {
    double target = 0.0;
    double ramp = 0.0;
    double hold = 0.0;
};

// Qubit idle at omega_a (drive off).
struct ResonantA {
    double duration = 0.0;
};

struct ResonantB {
    double duration = 0.0;
};

// Qubit at its parked frequency with the microwave drive on.
struct Rabi {
    double duration = 0.0;
    double omega_d = 0.0;
    double phase = 0.0;
    double amplitude = 0.0;
};

// Zero-duration diagonal phase exp(i phase) per listed basis state.
struct VirtualPhase {
    std::vector<std::pair<BasisState, double>> table;
};

using ControlSegment = std::variant<Shift, ResonantA, ResonantB, Rabi, VirtualPhase>;

double segment_duration(const ControlSegment& s);
std::string segment_kind(const ControlSegment& s);

struct ScheduleMetadata {
    std::string target;
    double estimated_duration = 0.0;  // closed-form estimate for the compile path
    double gate_time = 0.0;           // sum of A/B/R durations
    double shift_overhead = 0.0;      // ramp time spent moving the qubit
    std::vector<std::string> warnings;
};

struct PulseSchedule {
    SystemParams params;
    std::vector<ControlSegment> segments;
    ScheduleMetadata metadata;

    double total_duration() const;
    // Throws StructuralError on negative durations, out-of-band shifts or
    // repeated/out-of-space VirtualPhase entries.
    void validate() const;
};

// Cyclic units at the file boundary (GHz, MHz, ns).
nlohmann::json params_to_json(const SystemParams& p);
// Missing omega_q -> matched frequency, missing Omega -> recommended amplitude,
// missing cutoffs -> the supplied defaults.
SystemParams params_from_json(const nlohmann::json& j, int default_na_max = 5, int default_nb_max = 5);

nlohmann::json schedule_to_json(const PulseSchedule& s);
PulseSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace rqr
