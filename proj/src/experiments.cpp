#include "rqr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "rqr/errors.hpp"
#include "rqr/units.hpp"

namespace rqr {

using nlohmann::json;
using namespace units;

std::string fmt(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

// ---- selectivity scan ----------------------------------------------------

double ScanResult::min_on_diagonal() const {
    double m = std::numeric_limits<double>::infinity();
    for (int a = 0; a < na_count; ++a)
        for (int b = 0; b < nb_count; ++b)
            if (on_diagonal(a, b)) m = std::min(m, at(a, b));
    return m;
}

double ScanResult::max_off_diagonal() const {
    double m = 0.0;
    for (int a = 0; a < na_count; ++a)
        for (int b = 0; b < nb_count; ++b)
            if (!on_diagonal(a, b)) m = std::max(m, at(a, b));
    return m;
}

namespace {

// Peak probability for one cell from an eigendecomposition of the driven H.
double cell_peak(const ConstantPropagator& prop, const HilbertSpace& sp, int na, int nb, double window, int steps) {
    const auto& V = prop.eigenvectors();
    const auto& E = prop.energies();
    const auto src = static_cast<Eigen::Index>(sp.index(0, na, nb));
    const auto dst = static_cast<Eigen::Index>(sp.index(1, na, nb));
    const Eigen::VectorXcd w = (V.row(dst).transpose().array() * V.row(src).transpose().conjugate().array()).matrix();
    const double dt = window / steps;
    // Phases advance by a fixed rotation per step.
    Eigen::VectorXcd step(E.size()), phase = Eigen::VectorXcd::Ones(E.size());
    for (Eigen::Index k = 0; k < E.size(); ++k) step[k] = std::exp(cplx(0.0, -E[k] * dt));
    double best = 0.0;
    for (int i = 0; i <= steps; ++i) {
        if (i % 64 == 0)
            for (Eigen::Index k = 0; k < E.size(); ++k) phase[k] = std::exp(cplx(0.0, -E[k] * dt * i));
        best = std::max(best, std::norm(w.dot(phase.conjugate())));
        phase.array() *= step.array();
    }
    return std::min(1.0, best);
}

ConstantPropagator driven(const SystemParams& p, double omega_d) {
    return ConstantPropagator(build_hamiltonian(p, p.omega_q, Drive{omega_d, 0.0, p.Omega}, Frame::rotating(omega_d)));
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + r * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - r * (b - a); f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

// Coarse sweep followed by golden-section refinement around the best sample.
double maximize(const std::function<double(double)>& f, double center, double halfwidth) {
    constexpr int kCoarse = 41;
    const double step = 2.0 * halfwidth / (kCoarse - 1);
    double best_x = center, best_f = -1.0;
    for (int i = 0; i < kCoarse; ++i) {
        const double x = center - halfwidth + step * i;
        const double v = f(x);
        if (v > best_f) {
            best_f = v;
            best_x = x;
        }
    }
    const double refined = golden_max(f, best_x - step, best_x + step, 40);
    return f(refined) >= best_f ? refined : best_x;
}

}  // namespace

double max_transition_probability(const SystemParams& p, double omega_d, int na, int nb, double window, int steps) {
    return cell_peak(driven(p, omega_d), p.space(), na, nb, window, steps);
}

double find_resonance(const SystemParams& p, int na, int nb, double center, double halfwidth, double window,
                      int steps) {
    return maximize([&](double wd) { return max_transition_probability(p, wd, na, nb, window, steps); }, center,
                    halfwidth);
}

ScanResult run_selectivity_scan(const SystemParams& p, const ScanOptions& o) {
    if (o.na_count < 0 || o.nb_count < 0) throw PreconditionError("scan grid sizes must be non-negative");
    if (o.na_count > p.na_max || o.nb_count > p.nb_max)
        throw PreconditionError("truncation too small for the scan grid: need cutoffs >= grid size (one guard level)");
    if (!(p.Omega > 0.0)) throw PreconditionError("scan needs a nonzero drive amplitude");
    if (o.time_steps < 1) throw PreconditionError("scan needs at least one time step");

    ScanResult r;
    r.na_count = o.na_count;
    r.nb_count = o.nb_count;
    r.diagonal = o.diagonal;
    r.amplitude = p.Omega;
    r.window = o.window_periods * kTwoPi / p.Omega;
    r.dt = r.window / o.time_steps;
    // General drive formula at the first cell of the diagonal; equal on every cell when matched.
    r.formula_drive_freq = drive_frequency(p, std::max(0, o.diagonal), std::max(0, -o.diagonal));

    const HilbertSpace sp = p.space();
    auto grid = [&](double wd) {
        const ConstantPropagator prop = driven(p, wd);
        std::vector<double> out(static_cast<std::size_t>(o.na_count * o.nb_count));
        for (int a = 0; a < o.na_count; ++a)
            for (int b = 0; b < o.nb_count; ++b)
                out[static_cast<std::size_t>(a * o.nb_count + b)] = cell_peak(prop, sp, a, b, r.window, o.time_steps);
        return out;
    };

    switch (o.drive) {
        case DriveChoice::Literal:
            r.drive_freq = o.literal_drive;
            r.drive_mode = "literal";
            break;
        case DriveChoice::Formula:
            r.drive_freq = r.formula_drive_freq;
            r.drive_mode = "formula";
            break;
        case DriveChoice::Autotune: {
            const double hw = o.autotune_halfwidth > 0.0 ? o.autotune_halfwidth : mhz(5);
            auto objective = [&](double wd) {
                const ConstantPropagator prop = driven(p, wd);
                double m = std::numeric_limits<double>::infinity();
                for (int a = 0; a < o.na_count; ++a)
                    for (int b = 0; b < o.nb_count; ++b)
                        if (a - b == o.diagonal) m = std::min(m, cell_peak(prop, sp, a, b, r.window, o.time_steps));
                return std::isinf(m) ? 0.0 : m;
            };
            r.drive_freq = maximize(objective, r.formula_drive_freq, hw);
            r.drive_mode = "autotune";
            break;
        }
    }
    r.max_prob = grid(r.drive_freq);
    return r;
}

// ---- synthesis -----------------------------------------------------------

SynthReport run_synthesis(const SystemParams& p, const TargetSpec& target, const SynthOptions& o) {
    SynthReport rep;
    rep.target_label = target.label();
    if (o.path == "general") rep.sequence = compile_general(target, p, o.compile);
    else if (o.path == "noon") {
        const cplx ca = target.coefficient(target.N_a(), 0);
        const cplx cb = target.coefficient(0, target.N_b());
        if (std::abs(ca) == 0.0 || std::abs(cb) == 0.0) throw PreconditionError("noon path needs a NOON-shaped target");
        rep.sequence = compile_noon(target.N_a(), target.N_b(), p, std::arg(cb / ca), o.compile);
    } else if (o.path == "auto") rep.sequence = compile_target(target, p, o.compile);
    else throw ConfigError("unknown compile path '" + o.path + "'");

    rep.schedule = lower_schedule(rep.sequence, p, o.lowering);
    rep.schedule.metadata.target = target.label();
    if (p.Omega > 0.0) {
        rep.estimate_general = estimate_duration_general(target.N_a(), target.N_b(), p);
        if (target.N_a() >= 1 && target.N_b() >= 1) rep.estimate_noon = estimate_duration_noon(target.N_a(), target.N_b(), p);
    }

    const HilbertSpace sp = p.space();
    const StateVector goal = target.embed(sp);
    const StateVector vac = StateVector::basis(sp, 0, 0, 0);
    const PropagationResult ideal = propagate_schedule(rep.schedule, vac, PropagationMode::Idealized, o.propagation);
    rep.ideal_fidelity = fidelity(ideal.final_state, goal);
    rep.ideal_excited = ideal.final_state.excited_weight();
    rep.ideal_trajectory = ideal.trajectory;
    if (o.run_full) {
        const PropagationResult full = propagate_schedule(rep.schedule, vac, PropagationMode::Full, o.propagation);
        rep.full_fidelity = fidelity(full.final_state, goal);
        rep.full_excited = full.final_state.excited_weight();
        rep.full_trajectory = full.trajectory;
    }
    return rep;
}

// ---- timing --------------------------------------------------------------

std::vector<std::pair<std::string, SystemParams>> default_timing_sets() {
    return {{"reference", reference_params()}, {"estimate", estimate_params()}};
}

std::vector<TimingRow> run_timing_table(int max_n, const std::vector<std::pair<std::string, SystemParams>>& sets) {
    std::vector<TimingRow> rows;
    for (const auto& [name, p] : sets)
        for (int a = 1; a <= max_n; ++a)
            for (int b = 1; b <= max_n; ++b) {
                TimingRow r{name, a, b, estimate_duration_general(a, b, p), estimate_duration_noon(a, b, p), {}};
                if (name == "estimate" && a == 8 && b == 8) r.reference = ns(360);
                if (name == "reference" && a == 3 && b == 3) r.reference = ns(410);
                rows.push_back(r);
            }
    return rows;
}

// ---- NOON(3,3) reference trajectory --------------------------------------

std::vector<StateVector> golden_noon33_states(const HilbertSpace& space) {
    const cplx I{0.0, 1.0};
    struct Term {
        int q, na, nb;
        cplx c;
    };
    const std::vector<std::vector<Term>> rows = {
        {{0, 0, 0, 1.0}},
        {{0, 0, 0, 1.0}, {1, 0, 0, -I}},
        {{0, 0, 0, 1.0}, {0, 1, 0, -1.0}},
        {{0, 0, 0, 1.0}, {1, 1, 0, I}},
        {{0, 0, 0, 1.0}, {0, 2, 0, 1.0}},
        {{0, 0, 0, 1.0}, {1, 2, 0, -I}},
        {{0, 0, 0, 1.0}, {0, 3, 0, -1.0}},
        {{1, 0, 0, -I}, {0, 3, 0, -1.0}},
        {{0, 0, 1, -1.0}, {0, 3, 0, -1.0}},
        {{1, 0, 1, I}, {0, 3, 0, -1.0}},
        {{0, 0, 2, 1.0}, {0, 3, 0, -1.0}},
        {{1, 0, 2, -I}, {0, 3, 0, -1.0}},
        {{0, 0, 3, -1.0}, {0, 3, 0, -1.0}},
    };
    std::vector<StateVector> out;
    for (const auto& row : rows) {
        StateVector s(space);
        for (const auto& t : row) s.at(t.q, t.na, t.nb) = t.c;
        s.normalize();
        out.push_back(s);
    }
    return out;
}

double phase_aligned_error(const StateVector& a, const StateVector& b) {
    const cplx ov = b.amplitudes().dot(a.amplitudes());
    const cplx rot = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : cplx(1.0);
    return (a.amplitudes() * rot - b.amplitudes()).cwiseAbs().maxCoeff();
}

GoldenCheck validate_golden_trajectory(const SystemParams& p) {
    GoldenCheck c;
    const GateSequence seq = compile_noon(3, 3, p);
    const PulseSchedule sched = lower_schedule(seq, p, LoweringOptions{0.0, false, true});
    const HilbertSpace sp = p.space();
    const PropagationResult res = propagate_schedule(sched, StateVector::basis(sp, 0, 0, 0), PropagationMode::Idealized);
    const auto ref = golden_noon33_states(sp);
    c.gate_count = seq.gates.size();

    // Gate boundaries: after each Rabi pulse and after each return to the park frequency.
    std::vector<std::size_t> marks{0};
    for (std::size_t i = 0; i < sched.segments.size(); ++i) {
        const auto& seg = sched.segments[i];
        const auto* sh = std::get_if<Shift>(&seg);
        if (std::holds_alternative<Rabi>(seg) || (sh && sh->target == p.omega_q)) marks.push_back(i + 1);
    }
    if (marks.size() != ref.size())
        throw StructuralError("NOON(3,3) schedule does not realize one step per tabulated row");
    for (std::size_t i = 0; i < ref.size(); ++i) {
        c.row_errors.push_back(phase_aligned_error(res.trajectory[marks[i]], ref[i]));
        c.max_error = std::max(c.max_error, c.row_errors.back());
    }
    c.final_fidelity = fidelity(res.final_state, make_noon_target(3, 3).embed(sp));
    return c;
}

// ---- configuration and output -------------------------------------------

SystemParams ExperimentConfig::system_for(int N_a, int N_b) const {
    SystemParams p = system;
    if (!explicit_cutoffs) {
        p.na_max = N_a + 2;
        p.nb_max = N_b + 2;
    }
    return p;
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.base_dir = base_dir;
    try {
        const json sys = j.value("system", json::object());
        if (sys.empty()) cfg.system = reference_params();
        else cfg.system = params_from_json(sys);
        cfg.explicit_cutoffs = sys.contains("na_max") || sys.contains("nb_max");
        cfg.experiment = j.value("experiment", "");
        cfg.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("out")) cfg.out_dir = base_dir / j.at("out").get<std::string>();
        if (!cfg.experiment.empty() && j.contains(cfg.experiment)) cfg.args = j.at(cfg.experiment);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.warnings = validate_params(cfg.system);

    if (cfg.args.contains("target")) {
        const json& t = cfg.args.at("target");
        if (t.value("kind", "") == "file") {
            const auto path = base_dir / t.value("path", "");
            if (!std::filesystem::exists(path)) throw ConfigError("referenced target file does not exist: " + path.string());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

TargetSpec target_from_config(const ExperimentConfig& cfg) {
    if (!cfg.args.contains("target")) throw ConfigError("synthesis config needs a 'target' entry");
    const json& t = cfg.args.at("target");
    try {
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "noon") return make_noon_target(t.at("N_a").get<int>(), t.at("N_b").get<int>());
        if (kind == "max-entangled") return make_max_entangled_target(t.at("N").get<int>());
        if (kind == "random") {
            std::mt19937_64 rng(cfg.seed);
            return make_random_target(t.at("N_a").get<int>(), t.at("N_b").get<int>(), rng, t.value("real", false));
        }
        if (kind == "general") {
            int ma = 0, mb = 0;
            for (const auto& e : t.at("coefficients")) {
                const int na = e.at(0).get<int>(), nb = e.at(1).get<int>();
                if (na < 0) throw RangeError("n_a", na, 0);
                if (nb < 0) throw RangeError("n_b", nb, 0);
                ma = std::max(ma, na);
                mb = std::max(mb, nb);
            }
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(ma + 1, mb + 1);
            for (const auto& e : t.at("coefficients"))
                c(e.at(0).get<int>(), e.at(1).get<int>()) = cplx(e.at(2).get<double>(), e.at(3).get<double>());
            return make_general_target(c);
        }
        if (kind == "file") {
            const auto path = cfg.base_dir / t.at("path").get<std::string>();
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot open target file " + path.string());
            return read_target(in);
        }
        throw ConfigError("unknown target kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed target: ") + e.what());
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_scan_csv(const ScanResult& r, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "n_a,n_b,max_prob\n";
    for (int a = 0; a < r.na_count; ++a)
        for (int b = 0; b < r.nb_count; ++b) out << a << ',' << b << ',' << fmt(r.at(a, b)) << '\n';
    close_out(out, path);
}

json scan_metadata(const ScanResult& r) {
    return json{{"grid", {r.na_count, r.nb_count}},
                {"diagonal", r.diagonal},
                {"drive_mode", r.drive_mode},
                {"drive_GHz", fmt(to_ghz(r.drive_freq), 12)},
                {"formula_drive_GHz", fmt(to_ghz(r.formula_drive_freq), 12)},
                {"amplitude_MHz", fmt(to_mhz(r.amplitude))},
                {"window_ns", fmt(to_ns(r.window))},
                {"dt_ns", fmt(to_ns(r.dt))},
                {"min_on_diagonal", fmt(r.max_prob.empty() ? 0.0 : r.min_on_diagonal())},
                {"max_off_diagonal", fmt(r.max_off_diagonal())}};
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "param_set,N_a,N_b,t_general_ns,t_noon_ns,reference_ns,relative_deviation\n";
    for (const auto& r : rows) {
        out << r.param_set << ',' << r.N_a << ',' << r.N_b << ',' << fmt(to_ns(r.t_general)) << ','
            << fmt(to_ns(r.t_noon)) << ',';
        if (r.reference) out << fmt(to_ns(*r.reference)) << ',' << fmt((r.t_noon - *r.reference) / *r.reference, 6);
        else out << ',';
        out << '\n';
    }
    close_out(out, path);
}

json synthesis_report_json(const SynthReport& r) {
    const GateCounts c = r.sequence.counts();
    json gates = json::array();
    for (const auto& g : r.sequence.gates) gates.push_back(describe(g));
    json rep{{"target", r.target_label},
             {"path", r.sequence.path},
             {"gate_counts", {{"A", c.a}, {"B", c.b}, {"R", c.r}, {"total", c.total()}}},
             {"corrective_rotations", r.sequence.stats.corrections.size()},
             {"estimate_general_ns", fmt(to_ns(r.estimate_general))},
             {"estimate_noon_ns", fmt(to_ns(r.estimate_noon))},
             {"gate_time_ns", fmt(to_ns(r.schedule.metadata.gate_time))},
             {"shift_overhead_ns", fmt(to_ns(r.schedule.metadata.shift_overhead))},
             {"schedule_duration_ns", fmt(to_ns(r.schedule.total_duration()))},
             {"ideal_fidelity", fmt(r.ideal_fidelity, 15)},
             {"ideal_excited_amplitude", fmt(r.ideal_excited, 6)},
             {"segments", r.schedule.segments.size()},
             {"warnings", r.schedule.metadata.warnings},
             {"gates", gates}};
    if (r.sequence.path == "noon") rep["relative_phase_rad"] = fmt(r.sequence.relative_phase, 12);
    if (r.full_fidelity) {
        rep["full_fidelity"] = fmt(*r.full_fidelity, 10);
        rep["full_excited_amplitude"] = fmt(*r.full_excited, 6);
    }
    return rep;
}

json golden_report_json(const GoldenCheck& c) {
    json rows = json::array();
    for (double e : c.row_errors) rows.push_back(fmt(e, 3));
    return json{{"gate_count", c.gate_count},
                {"row_errors", rows},
                {"max_error", fmt(c.max_error, 3)},
                {"final_fidelity", fmt(c.final_fidelity, 15)}};
}

void write_json(const json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_out(out, path);
}

}  // namespace rqr
