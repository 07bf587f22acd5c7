#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "rqr/errors.hpp"
#include "rqr/experiments.hpp"
#include "rqr/units.hpp"

using namespace rqr;
using namespace rqr::units;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kGeneric = 1, kCompile = 2, kConfig = 3, kTolerance = 4 };

struct Common {
    std::string config_path;
    std::string mode;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string drive_freq;
};

ExperimentConfig load(const Common& c, const std::string& verb) {
    ExperimentConfig cfg = c.config_path.empty() ? config_from_json(json{{"experiment", verb}}, ".")
                                                 : load_config(c.config_path);
    if (cfg.experiment.empty()) cfg.experiment = verb;
    if (cfg.args.empty() && cfg.raw.contains(verb)) cfg.args = cfg.raw.at(verb);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) cfg.out_dir = c.out;
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cfg;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& verb, double wall,
                    const std::vector<std::string>& outputs) {
    json m{{"tool", "rqr"},
           {"version", kVersion},
           {"command", verb},
           {"seed", cfg.seed},
           {"config", cfg.raw},
           {"system", params_to_json(cfg.system)},
           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"warnings", cfg.warnings},
           {"wall_time_s", wall},
           {"outputs", outputs}};
    write_json(m, cfg.out_dir / "manifest.json");
}

template <class T>
T arg_or(const json& args, const char* key, T fallback) {
    if (!args.contains(key)) return fallback;
    try {
        return args.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

int run_scan(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load(c, "scan");
    const json& a = cfg.args;
    ScanOptions o;
    o.na_count = arg_or(a, "na_count", 4);
    o.nb_count = arg_or(a, "nb_count", 4);
    o.diagonal = arg_or(a, "diagonal", 2);
    o.time_steps = arg_or(a, "time_steps", 2000);
    o.window_periods = arg_or(a, "window_periods", 1.5);
    o.autotune_halfwidth = mhz(arg_or(a, "autotune_halfwidth_MHz", 5.0));
    o.literal_drive = ghz(arg_or(a, "drive_GHz", 7.025));
    const std::string choice = c.drive_freq.empty() ? arg_or<std::string>(a, "drive", "autotune") : c.drive_freq;
    if (choice == "literal") o.drive = DriveChoice::Literal;
    else if (choice == "autotune") o.drive = DriveChoice::Autotune;
    else if (choice == "formula") o.drive = DriveChoice::Formula;
    else throw ConfigError("--drive-freq must be literal, autotune or formula");

    const SystemParams p = cfg.system_for(std::max(0, o.na_count - 1), std::max(0, o.nb_count - 1));
    cfg.system = p;
    const ScanResult r = run_selectivity_scan(p, o);
    write_scan_csv(r, cfg.out_dir / "scan.csv");
    write_json(scan_metadata(r), cfg.out_dir / "scan_meta.json");
    std::printf("scan %dx%d diagonal %d, drive %s GHz (%s; formula %s GHz)\n", r.na_count, r.nb_count, r.diagonal,
                fmt(to_ghz(r.drive_freq), 10).c_str(), r.drive_mode.c_str(),
                fmt(to_ghz(r.formula_drive_freq), 10).c_str());
    for (int na = 0; na < r.na_count; ++na) {
        for (int nb = 0; nb < r.nb_count; ++nb) std::printf(" %6.3f", r.at(na, nb));
        std::printf("\n");
    }
    if (!r.max_prob.empty())
        std::printf("min on-diagonal %.4f, max off-diagonal %.4f\n", r.min_on_diagonal(), r.max_off_diagonal());
    write_manifest(cfg, "scan", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                   {"scan.csv", "scan_meta.json"});
    return kOk;
}

void dump_trajectory(std::ostream& out, const std::vector<StateVector>& traj, const PulseSchedule& s) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << "# after segment " << (i == 0 ? std::string("-") : std::to_string(i - 1));
        if (i > 0) out << " (" << segment_kind(s.segments[i - 1]) << ")";
        out << '\n';
        write_state(out, traj[i], 1e-12);
    }
}

int run_synth(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load(c, "synth");
    const json& a = cfg.args;
    const TargetSpec target = a.contains("target") ? target_from_config(cfg) : make_noon_target(3, 3);
    if (target.was_renormalized()) std::cerr << "warning: target coefficients were renormalized\n";
    const SystemParams p = cfg.system_for(target.N_a(), target.N_b());
    cfg.system = p;

    SynthOptions o;
    o.path = arg_or<std::string>(a, "path", "auto");
    const std::string mode = c.mode.empty() ? arg_or<std::string>(a, "mode", "ideal") : c.mode;
    if (mode != "ideal" && mode != "full") throw ConfigError("--mode must be ideal or full");
    o.run_full = mode == "full";
    o.lowering.ramp = ns(arg_or(a, "ramp_ns", 1.0));
    o.lowering.frame_compensation = arg_or(a, "frame_compensation", true);
    o.lowering.dressed_drive = arg_or(a, "dressed_drive", false);
    o.lowering.calibrate_spectators = arg_or(a, "calibrate_spectators", false);
    o.compile.guard = arg_or(a, "guard", 2);

    const SynthReport rep = run_synthesis(p, target, o);
    std::vector<std::string> outputs{"report.json", "gates.txt", "schedule.json", "target.txt", "trajectory.txt"};
    write_json(synthesis_report_json(rep), cfg.out_dir / "report.json");
    write_json(schedule_to_json(rep.schedule), cfg.out_dir / "schedule.json");
    {
        std::ofstream g(cfg.out_dir / "gates.txt");
        write_gate_sequence(g, rep.sequence);
        std::ofstream t(cfg.out_dir / "target.txt");
        write_target(t, target);
        std::ofstream tr(cfg.out_dir / "trajectory.txt");
        dump_trajectory(tr, rep.ideal_trajectory, rep.schedule);
        if (!g || !t || !tr) throw IoError("failed writing synthesis outputs in " + cfg.out_dir.string());
    }
    if (o.run_full) {
        std::ofstream tr(cfg.out_dir / "trajectory_full.txt");
        dump_trajectory(tr, rep.full_trajectory, rep.schedule);
        outputs.emplace_back("trajectory_full.txt");
    }

    const GateCounts n = rep.sequence.counts();
    std::printf("target %s (N_a=%d, N_b=%d), path %s\n", rep.target_label.c_str(), target.N_a(), target.N_b(),
                rep.sequence.path.c_str());
    std::printf("gates: %d A, %d B, %d R (%d total), corrective rotations %zu\n", n.a, n.b, n.r, n.total(),
                rep.sequence.stats.corrections.size());
    std::printf("gate time %.2f ns, shift overhead %.2f ns, estimate %.2f ns\n", to_ns(rep.schedule.metadata.gate_time),
                to_ns(rep.schedule.metadata.shift_overhead), to_ns(rep.schedule.metadata.estimated_duration));
    std::printf("idealized fidelity %.15f, qubit-excited amplitude %.2e\n", rep.ideal_fidelity, rep.ideal_excited);
    if (rep.full_fidelity)
        std::printf("full-model fidelity %.6f, qubit-excited amplitude %.3e\n", *rep.full_fidelity, *rep.full_excited);
    write_manifest(cfg, "synth", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), outputs);
    return rep.ideal_fidelity >= 1.0 - 1e-6 ? kOk : kTolerance;
}

int run_timing(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load(c, "timing");
    const int max_n = arg_or(cfg.args, "max_n", 8);
    auto sets = default_timing_sets();
    if (!c.config_path.empty() && cfg.raw.contains("system")) sets.emplace_back("config", cfg.system);
    const auto rows = run_timing_table(max_n, sets);
    write_timing_csv(rows, cfg.out_dir / "timing.csv");
    for (const auto& r : rows)
        if (r.reference)
            std::printf("%s (%d,%d): T_noon %.1f ns vs reference %.0f ns (%+.2f%%), T_max %.1f ns\n", r.param_set.c_str(),
                        r.N_a, r.N_b, to_ns(r.t_noon), to_ns(*r.reference), 100.0 * (r.t_noon - *r.reference) / *r.reference,
                        to_ns(r.t_general));
    write_manifest(cfg, "timing", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                   {"timing.csv"});
    return kOk;
}

int run_golden(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load(c, "validate-table1");
    const SystemParams p = cfg.system_for(3, 3);
    cfg.system = p;
    const GoldenCheck chk = validate_golden_trajectory(p);
    write_json(golden_report_json(chk), cfg.out_dir / "golden_trajectory.json");
    const bool ok = chk.max_error <= 1e-9 && chk.final_fidelity >= 1.0 - 1e-9;
    std::printf("NOON(3,3): %zu gates, max row error %.2e, final fidelity %.15f -> %s\n", chk.gate_count, chk.max_error,
                chk.final_fidelity, ok ? "ok" : "FAILED");
    write_manifest(cfg, "validate-table1",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), {"golden_trajectory.json"});
    return ok ? kOk : kTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-resonator state synthesis: selectivity scans, pulse compilation and simulation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", c.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "Output directory");
        sub->add_option("--seed", c.seed, "Seed for random targets");
    };
    auto* scan = app.add_subcommand("scan", "Stark-shifted Rabi selectivity scan");
    add_common(scan);
    scan->add_option("--drive-freq", c.drive_freq, "literal | autotune | formula");
    auto* synth = app.add_subcommand("synth", "Compile, lower and simulate a target state");
    add_common(synth);
    synth->add_option("--mode", c.mode, "ideal | full");
    auto* timing = app.add_subcommand("timing", "Duration estimates for the general and NOON paths");
    add_common(timing);
    auto* golden = app.add_subcommand("validate-table1", "Check the NOON(3,3) trajectory against the tabulated reference states");
    add_common(golden);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*scan) return run_scan(c);
        if (*synth) return run_synth(c);
        if (*timing) return run_timing(c);
        return run_golden(c);
    } catch (const CompilationError& e) {
        std::cerr << "compilation failed: " << e.what() << '\n';
        return kCompile;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kTolerance;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "invalid request: " << e.what() << '\n';
        return kConfig;
    } catch (const RangeError& e) {
        std::cerr << "invalid request: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGeneric;
    }
}
