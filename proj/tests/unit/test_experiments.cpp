#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rqr/errors.hpp"
#include "rqr/experiments.hpp"
#include "rqr/gates.hpp"
#include "rqr/hamiltonian.hpp"
#include "rqr/units.hpp"

using namespace rqr;
using namespace rqr::units;
using rqr::units::kTwoPi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rqr_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("scan grid shape and bounds") {
    ScanOptions o;
    o.time_steps = 400;
    const ScanResult r = run_selectivity_scan(reference_params(4, 4), o);
    CHECK(r.max_prob.size() == 16);
    for (double v : r.max_prob) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(r.drive_mode == "autotune");
    CHECK(std::abs(r.drive_freq - r.formula_drive_freq) <= mhz(5) + 1e-6);
    ScanOptions big;
    big.na_count = 6;
    CHECK_THROWS_AS(run_selectivity_scan(reference_params(5, 5), big), PreconditionError);
}

TEST_CASE("own-resonance peak equals the dressed-state overlap") {
    // The drive inverts the dressed pair; the bare-state probability tops out at the
    // product of the bare weights in the two dressed states.
    const SystemParams p = reference_params(4, 4);
    const ConstantPropagator U(build_hamiltonian(p, p.omega_q, std::nullopt));
    const HilbertSpace s = p.space();
    double wg = 0.0, we = 0.0;
    for (Eigen::Index k = 0; k < U.energies().size(); ++k) {
        wg = std::max(wg, std::norm(U.eigenvectors()(s.index(0, 2, 0), k)));
        we = std::max(we, std::norm(U.eigenvectors()(s.index(1, 2, 0), k)));
    }
    const double window = 1.5 * kTwoPi / p.Omega;
    const double wd = find_resonance(p, 2, 0, diagonal_frequency(p, 2), mhz(5), window, 2000);
    CHECK(max_transition_probability(p, wd, 2, 0, window, 2000) == doctest::Approx(wg * we).epsilon(2e-3));
}

TEST_CASE("off-resonant cells follow the two-level Rabi formula") {
    // Peak of Omega^2 sin^2(W t / 2) / W^2 with W^2 = Omega^2 + delta^2, delta from the ladder spacing.
    const SystemParams p = reference_params(4, 4);
    const double spacing = delta_omega(p).value;
    const double window = 1.5 * kTwoPi / p.Omega;
    const double wd = find_resonance(p, 2, 0, diagonal_frequency(p, 2), mhz(5), window, 2000);
    for (int k : {1, 2}) {
        const double delta = k * spacing;
        const double oracle = p.Omega * p.Omega / (p.Omega * p.Omega + delta * delta);
        CHECK(max_transition_probability(p, wd, 2 - k, 0, window, 2000) == doctest::Approx(oracle).epsilon(0.1));
    }
}

TEST_CASE("weak drive leaves off-diagonal cells untouched") {
    SystemParams p = reference_params(4, 4);
    p.Omega = mhz(1);
    const ScanResult r = run_selectivity_scan(p, ScanOptions{});
    CHECK(r.max_off_diagonal() < 0.01);
    CHECK(r.min_on_diagonal() > 10 * r.max_off_diagonal());
}

TEST_CASE("literal drive choice is honoured") {
    ScanOptions o;
    o.drive = DriveChoice::Literal;
    o.literal_drive = ghz(7.025);
    o.time_steps = 200;
    const ScanResult r = run_selectivity_scan(reference_params(4, 4), o);
    CHECK(r.drive_freq == o.literal_drive);
    CHECK(r.drive_mode == "literal");
}

TEST_CASE("timing table") {
    const auto rows = run_timing_table(8);
    int flagged = 0;
    for (const auto& r : rows) {
        CHECK(r.t_noon < r.t_general + 1e-15);
        if (r.reference) {
            ++flagged;
            CHECK(std::abs(r.t_noon - *r.reference) / *r.reference < 0.05);
        }
    }
    CHECK(flagged == 2);
    // NOON time grows with N along the diagonal.
    double last = 0.0;
    for (const auto& r : rows)
        if (r.param_set == "estimate" && r.N_a == r.N_b) {
            CHECK(r.t_noon > last);
            last = r.t_noon;
        }
}

TEST_CASE("golden NOON(3,3) trajectory") {
    const GoldenCheck c = validate_golden_trajectory(reference_params(5, 5));
    CHECK(c.gate_count == 12);
    CHECK(c.row_errors.size() == 13);
    CHECK(c.max_error < 1e-9);
    CHECK(c.final_fidelity > 1 - 1e-9);
}

TEST_CASE("phase-aligned error ignores global phase") {
    const HilbertSpace s(1, 1);
    StateVector a(s);
    a.at(0, 1, 0) = 0.6;
    a.at(0, 0, 1) = cplx(0, 0.8);
    StateVector b = a;
    b.amplitudes() *= std::exp(cplx(0, 2.1));
    CHECK(phase_aligned_error(a, b) < 1e-15);
    b.at(0, 1, 0) *= -1.0;
    CHECK(phase_aligned_error(a, b) > 0.1);
}

TEST_CASE("synthesis report") {
    SynthOptions o;
    const SynthReport r = run_synthesis(reference_params(4, 4), make_max_entangled_target(2), o);
    CHECK(r.sequence.path == "general");
    CHECK(r.ideal_fidelity > 1 - 1e-12);
    CHECK(r.ideal_excited < 1e-12);
    CHECK_FALSE(r.full_fidelity.has_value());
    CHECK(r.estimate_general > r.estimate_noon);
    const json j = synthesis_report_json(r);
    CHECK(j.contains("ideal_fidelity"));
}

TEST_CASE("config parsing") {
    const fs::path d = scratch_dir("config");
    const ExperimentConfig def = config_from_json(json{{"experiment", "scan"}}, d);
    CHECK(def.system.omega_q == reference_params().omega_q);
    CHECK(def.system_for(3, 2).na_max == 5);
    CHECK(def.system_for(3, 2).nb_max == 4);

    CHECK_THROWS_AS(config_from_json(json::array(), d), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"system", {{"omega_a_GHz", 6.3}}}}, d), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"system", {{"omega_a_GHz", "six"}, {"omega_b_GHz", 7.7}, {"g_a_MHz", 70},
                                                      {"g_b_MHz", 70}}}},
                                     d),
                    ConfigError);
    const json missing{{"experiment", "synth"}, {"synth", {{"target", {{"kind", "file"}, {"path", "nope.txt"}}}}}};
    CHECK_THROWS_AS(config_from_json(missing, d), ConfigError);
    CHECK_THROWS_AS(load_config(d / "absent.json"), ConfigError);
    std::ofstream(d / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_config(d / "bad.json"), ConfigError);
}

TEST_CASE("targets from config") {
    const fs::path d = scratch_dir("targets");
    auto with = [&](json target, std::uint64_t seed = 0) {
        json j{{"experiment", "synth"}, {"seed", seed}, {"synth", {{"target", target}}}};
        return target_from_config(config_from_json(j, d));
    };
    CHECK(with({{"kind", "noon"}, {"N_a", 2}, {"N_b", 1}}).label() == "noon(2,1)");
    CHECK(with({{"kind", "max-entangled"}, {"N", 2}}).N_a() == 2);
    const TargetSpec g = with({{"kind", "general"}, {"coefficients", {{0, 0, 1.0, 0.0}, {1, 2, 0.0, 1.0}}}});
    CHECK(g.N_b() == 2);
    CHECK(std::abs(g.coefficient(1, 2) - cplx(0, 1 / std::sqrt(2.0))) < 1e-15);
    const TargetSpec r1 = with({{"kind", "random"}, {"N_a", 2}, {"N_b", 2}}, 5);
    const TargetSpec r2 = with({{"kind", "random"}, {"N_a", 2}, {"N_b", 2}}, 5);
    const TargetSpec r3 = with({{"kind", "random"}, {"N_a", 2}, {"N_b", 2}}, 6);
    CHECK((r1.coefficients() - r2.coefficients()).norm() == 0.0);
    CHECK((r1.coefficients() - r3.coefficients()).norm() > 0.1);
    {
        std::ofstream f(d / "t.txt");
        write_target(f, make_noon_target(1, 2));
    }
    CHECK(with({{"kind", "file"}, {"path", "t.txt"}}).N_b() == 2);
    CHECK_THROWS_AS(with({{"kind", "cat-state"}}), ConfigError);
    CHECK_THROWS_AS(with({{"kind", "noon"}, {"N_a", 2}}), ConfigError);
    CHECK_THROWS_AS(with({{"kind", "general"}, {"coefficients", {{-1, 0, 1.0, 0.0}}}}), RangeError);
}

TEST_CASE("outputs are byte-identical across runs") {
    const fs::path d = scratch_dir("determinism");
    ScanOptions o;
    o.time_steps = 300;
    for (const char* name : {"a.csv", "b.csv"}) write_scan_csv(run_selectivity_scan(reference_params(4, 4), o), d / name);
    CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
    CHECK(slurp(d / "a.csv").rfind("n_a,n_b,max_prob\n", 0) == 0);
    int lines = 0;
    for (char ch : slurp(d / "a.csv")) lines += ch == '\n';
    CHECK(lines == 17);

    write_json(synthesis_report_json(run_synthesis(reference_params(4, 4), make_noon_target(2, 2))), d / "r1.json");
    write_json(synthesis_report_json(run_synthesis(reference_params(4, 4), make_noon_target(2, 2))), d / "r2.json");
    CHECK(slurp(d / "r1.json") == slurp(d / "r2.json"));
    write_timing_csv(run_timing_table(4), d / "t1.csv");
    write_timing_csv(run_timing_table(4), d / "t2.csv");
    CHECK(slurp(d / "t1.csv") == slurp(d / "t2.csv"));
}
