#include "rqr/propagator.hpp"

#include <cmath>
#include <string>

#include <Eigen/Sparse>

#include "rqr/errors.hpp"
#include "rqr/gates.hpp"
#include "rqr/hamiltonian.hpp"

namespace rqr {

namespace {

bool near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

void require_frequency(double current, double wanted, double rel, const char* what, std::size_t seg) {
    if (!near(current, wanted, rel))
        throw StructuralError(std::string("schedule/params mismatch: ") + what + " with qubit detuned (segment " +
                              std::to_string(seg) + ")");
}

int selected_diagonal(const SystemParams& p, double omega_d, std::size_t seg) {
    const double dw = delta_omega(p).value;
    const double x = (omega_d - p.omega_q) / dw;
    const double n = std::round(x);
    if (std::abs(x - n) > 0.45)
        throw StructuralError("Rabi drive frequency does not select a diagonal (segment " + std::to_string(seg) + ")");
    return static_cast<int>(n);
}

// Diagonal of H_ref - w_fr N.
Eigen::VectorXd frame_offsets(const SystemParams& p, double w_fr) {
    const HilbertSpace sp = p.space();
    Eigen::VectorXd k(static_cast<Eigen::Index>(sp.dim()));
    for (std::size_t i = 0; i < sp.dim(); ++i) {
        const BasisState s = sp.state(i);
        k[static_cast<Eigen::Index>(i)] = (p.omega_q - w_fr) * s.q + (p.omega_a - w_fr) * s.na + (p.omega_b - w_fr) * s.nb;
    }
    return k;
}

void apply_diag_phase(StateVector& psi, const Eigen::VectorXd& k, double t) {
    auto& v = psi.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::exp(cplx(0.0, k[i] * t));
}

void check_norm(const StateVector& psi, double ref, double tol, std::size_t seg) {
    const double drift = std::abs(psi.norm() / ref - 1.0);
    if (drift > tol) throw NumericalError("norm drift " + std::to_string(drift) + " exceeds tolerance", seg);
}

PropagationResult run_idealized(const PulseSchedule& sched, const StateVector& psi0, const PropagationOptions& o) {
    const SystemParams& p = sched.params;
    PropagationResult res{psi0, {psi0}};
    StateVector psi = psi0;
    double w = p.omega_q;
    for (std::size_t i = 0; i < sched.segments.size(); ++i) {
        const auto& seg = sched.segments[i];
        if (const auto* sh = std::get_if<Shift>(&seg)) {
            w = sh->target;
        } else if (const auto* a = std::get_if<ResonantA>(&seg)) {
            require_frequency(w, p.omega_a, o.frequency_tolerance, "resonant A", i);
            apply_gate(psi, GateA{p.g_a * a->duration});
        } else if (const auto* b = std::get_if<ResonantB>(&seg)) {
            require_frequency(w, p.omega_b, o.frequency_tolerance, "resonant B", i);
            apply_gate(psi, GateB{p.g_b * b->duration});
        } else if (const auto* r = std::get_if<Rabi>(&seg)) {
            require_frequency(w, p.omega_q, o.frequency_tolerance, "Rabi pulse", i);
            apply_gate(psi, GateR{selected_diagonal(p, r->omega_d, i), r->amplitude * r->duration, r->phase});
        }
        res.trajectory.push_back(psi);
    }
    res.final_state = psi;
    return res;
}

// exp(-i H_rot (t1 - t0)) in the frame at w_fr, mapped from and back to the idle frame.
void constant_segment(StateVector& psi, const DenseOperator& H_rot, const Eigen::VectorXd& k, double t0, double t1) {
    apply_diag_phase(psi, k, -t0);
    psi = ConstantPropagator(H_rot).apply(psi, t1 - t0);
    apply_diag_phase(psi, k, t1);
}

PropagationResult run_full(const PulseSchedule& sched, const StateVector& psi0, const PropagationOptions& o) {
    const SystemParams& p = sched.params;
    PropagationResult res{psi0, {psi0}};
    StateVector psi = psi0;
    double w = p.omega_q;
    double t = 0.0;
    for (std::size_t i = 0; i < sched.segments.size(); ++i) {
        const auto& seg = sched.segments[i];
        const double ref = psi.norm();
        if (const auto* sh = std::get_if<Shift>(&seg)) {
            if (sh->ramp > 0.0) {
                const double w_fr = 0.5 * (w + sh->target);
                const Eigen::VectorXd k = frame_offsets(p, w_fr);
                apply_diag_phase(psi, k, -t);
                psi = rk4_ramp(p, w, sh->target, sh->ramp, w_fr, psi, o.ramp_step_factor);
                t += sh->ramp;
                apply_diag_phase(psi, k, t);
                check_norm(psi, ref, o.norm_tolerance, i);
            }
            w = sh->target;
            if (sh->hold > 0.0) {
                constant_segment(psi, build_hamiltonian(p, w, std::nullopt, Frame::rotating(w)), frame_offsets(p, w), t,
                                 t + sh->hold);
                t += sh->hold;
            }
        } else if (const auto* a = std::get_if<ResonantA>(&seg)) {
            require_frequency(w, p.omega_a, o.frequency_tolerance, "resonant A", i);
            constant_segment(psi, build_hamiltonian(p, w, std::nullopt, Frame::rotating(w)), frame_offsets(p, w), t,
                             t + a->duration);
            t += a->duration;
        } else if (const auto* b = std::get_if<ResonantB>(&seg)) {
            require_frequency(w, p.omega_b, o.frequency_tolerance, "resonant B", i);
            constant_segment(psi, build_hamiltonian(p, w, std::nullopt, Frame::rotating(w)), frame_offsets(p, w), t,
                             t + b->duration);
            t += b->duration;
        } else if (const auto* r = std::get_if<Rabi>(&seg)) {
            require_frequency(w, p.omega_q, o.frequency_tolerance, "Rabi pulse", i);
            const Drive d{r->omega_d, r->phase, r->amplitude};
            constant_segment(psi, build_hamiltonian(p, w, d, Frame::rotating(r->omega_d)), frame_offsets(p, r->omega_d),
                             t, t + r->duration);
            t += r->duration;
        } else {
            const HilbertSpace sp = p.space();
            for (const auto& [st, ph] : std::get<VirtualPhase>(seg).table) psi[sp.index(st)] *= std::exp(cplx(0.0, ph));
        }
        check_norm(psi, ref, o.norm_tolerance, i);
        res.trajectory.push_back(psi);
    }
    res.final_state = psi;
    return res;
}

}  // namespace

StateVector rk4_ramp(const SystemParams& p, double w_start, double w_end, double duration, double frame_omega,
                     const StateVector& psi, double step_factor) {
    if (duration <= 0.0) return psi;
    // H(t) = H0 + delta(t) P_e with the qubit term measured from the frame frequency.
    const DenseOperator H0 = build_hamiltonian(p, frame_omega, std::nullopt, Frame::rotating(frame_omega));
    const Eigen::SparseMatrix<cplx> S = H0.matrix().sparseView();
    const auto rd = static_cast<Eigen::Index>(p.space().resonator_dim());
    const double d0 = w_start - frame_omega;
    const double d1 = w_end - frame_omega;

    const double row_bound = H0.matrix().cwiseAbs().rowwise().sum().maxCoeff();
    const double rho = row_bound + std::max(std::abs(d0), std::abs(d1));
    const auto steps = static_cast<long>(std::ceil(duration * step_factor * rho));
    const double h = duration / static_cast<double>(std::max(1L, steps));

    auto deriv = [&](double t, const Eigen::VectorXcd& x) {
        Eigen::VectorXcd y = S * x;
        const double delta = d0 + (d1 - d0) * (t / duration);
        y.tail(rd) += delta * x.tail(rd);
        return Eigen::VectorXcd(cplx(0.0, -1.0) * y);
    };

    Eigen::VectorXcd x = psi.amplitudes();
    for (long s = 0; s < std::max(1L, steps); ++s) {
        const double t = h * static_cast<double>(s);
        const Eigen::VectorXcd k1 = deriv(t, x);
        const Eigen::VectorXcd k2 = deriv(t + h / 2, x + (h / 2) * k1);
        const Eigen::VectorXcd k3 = deriv(t + h / 2, x + (h / 2) * k2);
        const Eigen::VectorXcd k4 = deriv(t + h, x + h * k3);
        x += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return StateVector(psi.space(), std::move(x));
}

PropagationResult propagate_schedule(const PulseSchedule& sched, const StateVector& psi0, PropagationMode mode,
                                     const PropagationOptions& opts) {
    if (!(psi0.space() == sched.params.space()))
        throw StructuralError("initial state does not live in the schedule's space");
    sched.validate();
    return mode == PropagationMode::Idealized ? run_idealized(sched, psi0, opts) : run_full(sched, psi0, opts);
}

}  // namespace rqr
