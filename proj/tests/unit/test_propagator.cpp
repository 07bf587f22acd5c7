#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rqr/compiler.hpp"
#include "rqr/errors.hpp"
#include "rqr/hamiltonian.hpp"
#include "rqr/propagator.hpp"
#include "rqr/units.hpp"

using namespace rqr;
using namespace rqr::units;
using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

PulseSchedule empty_schedule(const SystemParams& p) {
    PulseSchedule s;
    s.params = p;
    return s;
}

// Structural equality with numbers compared to 1e-14 relative (unit conversion rounds).
bool json_close(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        return std::abs(x - y) <= 1e-14 * std::max({1.0, std::abs(x), std::abs(y)});
    }
    if (a.type() != b.type() || a.size() != b.size()) return false;
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it)
            if (!b.contains(it.key()) || !json_close(*it, b.at(it.key()))) return false;
        return true;
    }
    if (a.is_array()) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!json_close(a[i], b[i])) return false;
        return true;
    }
    return a == b;
}

}  // namespace

TEST_CASE("empty schedule is the identity") {
    const SystemParams p = reference_params(2, 2);
    const StateVector psi = StateVector::basis(p.space(), 0, 1, 2);
    for (auto mode : {PropagationMode::Idealized, PropagationMode::Full}) {
        const PropagationResult r = propagate_schedule(empty_schedule(p), psi, mode);
        CHECK(r.trajectory.size() == 1);
        CHECK((r.final_state.amplitudes() - psi.amplitudes()).norm() == 0.0);
    }
}

TEST_CASE("idealized propagation of a lowered schedule reproduces the gate sequence") {
    const SystemParams p = reference_params(5, 5);
    const GateSequence seq = compile_noon(3, 3, p);
    const PulseSchedule s = lower_schedule(seq, p);
    const PropagationResult r =
        propagate_schedule(s, StateVector::basis(p.space(), 0, 0, 0), PropagationMode::Idealized);
    CHECK(r.trajectory.size() == s.segments.size() + 1);
    CHECK((r.final_state.amplitudes() - seq.snapshots.back().amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(fidelity(r.final_state, make_noon_target(3, 3).embed(p.space())) > 1 - 1e-12);
}

TEST_CASE("full-model pi pulse on the vacuum diagonal") {
    const SystemParams p = reference_params(3, 3);
    PulseSchedule s = empty_schedule(p);
    s.segments.emplace_back(Rabi{pi / p.Omega, diagonal_frequency(p, 0), 0.0, p.Omega});
    const StateVector out =
        propagate_schedule(s, StateVector::basis(p.space(), 0, 0, 0), PropagationMode::Full).final_state;
    double p1 = 0.0;
    for (std::size_t i = p.space().resonator_dim(); i < p.space().dim(); ++i) p1 += std::norm(out[i]);
    CHECK(p1 >= 0.95);
}

TEST_CASE("RK4 with a constant qubit frequency matches the eigen propagator") {
    const SystemParams p = reference_params(2, 2);
    StateVector psi(p.space());
    psi.at(1, 0, 0) = 0.6;
    psi.at(0, 1, 1) = cplx(0, 0.8);
    const double w = p.omega_a + mhz(30), T = ns(20);
    const StateVector rk = rk4_ramp(p, w, w, T, w, psi);
    const StateVector ex = propagate_constant(build_hamiltonian(p, w, std::nullopt, Frame::rotating(w)), psi, T);
    CHECK((rk.amplitudes() - ex.amplitudes()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("uncoupled ramp accumulates the integrated detuning") {
    SystemParams p = reference_params(1, 1);
    p.g_a = p.g_b = 0.0;
    const double w0 = p.omega_q, w1 = p.omega_a, T = ns(1), fr = p.omega_q;
    const StateVector out = rk4_ramp(p, w0, w1, T, fr, StateVector::basis(p.space(), 1, 0, 0));
    // Phase -int (w(t) - fr) dt with w linear from w0 to w1.
    const double phase = -(0.5 * (w0 + w1) - fr) * T;
    CHECK(std::abs(out.at(1, 0, 0) - std::exp(cplx(0, phase))) < 1e-9);
}

TEST_CASE("structural mismatches are reported") {
    const SystemParams p = reference_params(2, 2);
    const StateVector psi = StateVector::basis(p.space(), 0, 0, 0);

    PulseSchedule a = empty_schedule(p);
    a.segments.emplace_back(ResonantA{ns(5)});
    CHECK_THROWS_AS(propagate_schedule(a, psi, PropagationMode::Idealized), StructuralError);

    PulseSchedule r = empty_schedule(p);
    r.segments.emplace_back(Rabi{ns(10), diagonal_frequency(p, 0) + 0.5 * delta_omega(p).value, 0.0, p.Omega});
    CHECK_THROWS_AS(propagate_schedule(r, psi, PropagationMode::Idealized), StructuralError);

    PulseSchedule neg = empty_schedule(p);
    neg.segments.emplace_back(ResonantB{-1.0});
    CHECK_THROWS_AS(neg.validate(), StructuralError);

    PulseSchedule band = empty_schedule(p);
    band.segments.emplace_back(Shift{p.omega_b + ghz(1), 0.0, 0.0});
    CHECK_THROWS_AS(band.validate(), StructuralError);

    PulseSchedule ph = empty_schedule(p);
    ph.segments.emplace_back(VirtualPhase{{{BasisState{1, 0, 0}, 0.1}, {BasisState{1, 0, 0}, 0.2}}});
    CHECK_THROWS_AS(ph.validate(), StructuralError);

    const StateVector other = StateVector::basis(HilbertSpace(3, 2), 0, 0, 0);
    CHECK_THROWS_AS(propagate_schedule(empty_schedule(p), other, PropagationMode::Full), StructuralError);
}

TEST_CASE("an unstable ramp step raises a numerical error") {
    const SystemParams p = reference_params(2, 2);
    PulseSchedule s = empty_schedule(p);
    s.segments.emplace_back(Shift{p.omega_a, ns(1), 0.0});
    PropagationOptions o;
    o.ramp_step_factor = 0.3;
    CHECK_THROWS_AS(propagate_schedule(s, StateVector::basis(p.space(), 1, 1, 0), PropagationMode::Full, o),
                    NumericalError);
}

TEST_CASE("full mode keeps the norm through ramps") {
    const SystemParams p = reference_params(4, 3);
    const PulseSchedule s = lower_schedule(compile_noon(2, 1, p), p);
    const PropagationResult r = propagate_schedule(s, StateVector::basis(p.space(), 0, 0, 0), PropagationMode::Full);
    for (const auto& x : r.trajectory) CHECK(std::abs(x.norm() - 1.0) < 1e-9);
}

TEST_CASE("schedule and parameter JSON round trip") {
    const SystemParams p = reference_params(4, 4);
    PulseSchedule s = lower_schedule(compile_noon(2, 2, p), p);
    const json j = schedule_to_json(s);
    const PulseSchedule back = schedule_from_json(j);
    CHECK(json_close(schedule_to_json(back), j));
    CHECK(back.segments.size() == s.segments.size());
    CHECK(back.total_duration() == doctest::Approx(s.total_duration()).epsilon(1e-12));

    const SystemParams q = params_from_json(params_to_json(p));
    CHECK(q.omega_q == doctest::Approx(p.omega_q).epsilon(1e-15));
    CHECK(q.na_max == 4);

    json partial = params_to_json(p);
    partial.erase("omega_q_GHz");
    partial.erase("Omega_MHz");
    const SystemParams r = params_from_json(partial);
    CHECK(to_ghz(r.omega_q) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(r.Omega == doctest::Approx(max_selective_amplitude(r).recommended));
    partial.erase("g_a_MHz");
    CHECK_THROWS_AS(params_from_json(partial), ConfigError);
}
