#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rqr/compiler.hpp"
#include "rqr/dispersive.hpp"
#include "rqr/hamiltonian.hpp"
#include "rqr/propagator.hpp"

namespace rqr {

// ---- selectivity scan ----------------------------------------------------

enum class DriveChoice { Autotune, Literal, Formula };

struct ScanOptions {
    int na_count = 4;
    int nb_count = 4;
    int diagonal = 2;  // n_a - n_b selected by the drive
    DriveChoice drive = DriveChoice::Autotune;
    double literal_drive = 0.0;  // rad/s, used with DriveChoice::Literal
    double autotune_halfwidth = 0.0;  // rad/s; 0 means 5 MHz
    int time_steps = 2000;
    double window_periods = 1.5;  // window = window_periods * 2 pi / Omega
};

struct ScanResult {
    int na_count = 0;
    int nb_count = 0;
    int diagonal = 0;
    std::vector<double> max_prob;  // row-major in (n_a, n_b)
    double drive_freq = 0.0;
    double formula_drive_freq = 0.0;  // drive_frequency() for the diagonal
    double amplitude = 0.0;
    double window = 0.0;
    double dt = 0.0;
    std::string drive_mode;

    double at(int na, int nb) const { return max_prob[static_cast<std::size_t>(na * nb_count + nb)]; }
    bool on_diagonal(int na, int nb) const { return na - nb == diagonal; }
    double min_on_diagonal() const;
    double max_off_diagonal() const;
};

// Peak of |<1,n_a,n_b|psi(t)>|^2 over t in [0, window] from |0,n_a,n_b> under a constant drive.
double max_transition_probability(const SystemParams& p, double omega_d, int na, int nb, double window, int steps);

// Drive frequency within center +- halfwidth maximizing the peak probability of one cell.
double find_resonance(const SystemParams& p, int na, int nb, double center, double halfwidth, double window,
                      int steps);

ScanResult run_selectivity_scan(const SystemParams& p, const ScanOptions& opts = {});

// ---- synthesis -----------------------------------------------------------

struct SynthOptions {
    std::string path = "auto";  // auto | general | noon
    bool run_full = false;
    CompileOptions compile;
    LoweringOptions lowering;
    PropagationOptions propagation;
};

struct SynthReport {
    std::string target_label;
    GateSequence sequence;
    PulseSchedule schedule;
    double estimate_general = 0.0;
    double estimate_noon = 0.0;  // 0 when the target has no NOON extents
    double ideal_fidelity = 0.0;
    double ideal_excited = 0.0;
    std::vector<StateVector> ideal_trajectory;
    std::optional<double> full_fidelity;
    std::optional<double> full_excited;
    std::vector<StateVector> full_trajectory;
};

SynthReport run_synthesis(const SystemParams& p, const TargetSpec& target, const SynthOptions& opts = {});

// ---- timing --------------------------------------------------------------

struct TimingRow {
    std::string param_set;
    int N_a = 0;
    int N_b = 0;
    double t_general = 0.0;
    double t_noon = 0.0;
    std::optional<double> reference;  // reference NOON duration for this row
};

std::vector<std::pair<std::string, SystemParams>> default_timing_sets();
std::vector<TimingRow> run_timing_table(int max_n = 8,
                                        const std::vector<std::pair<std::string, SystemParams>>& sets =
                                            default_timing_sets());

// ---- NOON(3,3) reference trajectory --------------------------------------

// |0,0,0> followed by the twelve tabulated states, each normalized.
std::vector<StateVector> golden_noon33_states(const HilbertSpace& space);

struct GoldenCheck {
    std::vector<double> row_errors;  // max per-amplitude error after global-phase alignment
    double max_error = 0.0;
    double final_fidelity = 0.0;
    std::size_t gate_count = 0;
};

GoldenCheck validate_golden_trajectory(const SystemParams& p);

// Max |a_i e^{-i gamma} - b_i| with gamma aligning the overlap phase.
double phase_aligned_error(const StateVector& a, const StateVector& b);

// ---- configuration and output -------------------------------------------

struct ExperimentConfig {
    SystemParams system;
    std::string experiment;
    nlohmann::json args = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    std::filesystem::path base_dir = ".";
    bool explicit_cutoffs = false;
    std::vector<std::string> warnings;
    nlohmann::json raw;

    // System parameters with cutoffs defaulting to the given extents plus two guard levels.
    SystemParams system_for(int N_a, int N_b) const;
};

// Throws ConfigError for missing fields, bad units, or missing referenced files.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Resolves args.target: {"kind": "noon"|"max-entangled"|"general"|"random"|"file", ...}.
TargetSpec target_from_config(const ExperimentConfig& cfg);

void write_scan_csv(const ScanResult& r, const std::filesystem::path& path);
nlohmann::json scan_metadata(const ScanResult& r);
void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path);
nlohmann::json synthesis_report_json(const SynthReport& r);
nlohmann::json golden_report_json(const GoldenCheck& c);

// Writes pretty JSON with a trailing newline.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

// Fixed-width decimal text used in every emitted file.
std::string fmt(double x, int digits = 10);

}  // namespace rqr
