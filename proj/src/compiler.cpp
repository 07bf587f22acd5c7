#include "rqr/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rqr/errors.hpp"
#include "rqr/hamiltonian.hpp"

namespace rqr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNonzero = 1e-14;

}  // namespace

namespace {

// Residual phase per basis state off the pulse's diagonal after the Stark-compensated
// pulse, from the exact idle-frame propagator exp(iK t1) exp(-iH d) exp(-iK t0).
Eigen::VectorXd spectator_phases(const SystemParams& p, const GateR& r, double wd, const Eigen::VectorXd& stark,
                                 double d) {
    const HilbertSpace sp = p.space();
    const auto dim = static_cast<Eigen::Index>(sp.dim());
    const ConstantPropagator prop(build_hamiltonian(p, p.omega_q, Drive{wd, r.phi, p.Omega}, Frame::rotating(wd)));
    Eigen::VectorXd k(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const BasisState b = sp.state(static_cast<std::size_t>(i));
        k[i] = (p.omega_q - wd) * b.q + (p.omega_a - wd) * b.na + (p.omega_b - wd) * b.nb;
    }
    Eigen::VectorXcd ph(dim);
    for (Eigen::Index i = 0; i < dim; ++i) ph[i] = std::exp(cplx(0.0, -prop.energies()[i] * d));
    const Eigen::MatrixXcd U = prop.eigenvectors() * ph.asDiagonal() * prop.eigenvectors().adjoint();

    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const BasisState b = sp.state(static_cast<std::size_t>(i));
        if (b.na - b.nb == r.n) continue;
        // Diagonal of exp(iS t1) exp(iK t1) U exp(-iK t0) exp(-iS t0) depends on d only.
        const cplx u = U(i, i) * std::exp(cplx(0.0, (k[i] + stark[i]) * d));
        if (std::abs(u) > 0.5) out[i] = std::arg(u);
    }
    return out;
}

}  // namespace

TargetSpec::TargetSpec(Eigen::MatrixXcd coefficients, std::string label) : label_(std::move(label)) {
    if (coefficients.size() == 0) throw StructuralError("empty target coefficient table");
    const double n2 = coefficients.squaredNorm();
    if (!(n2 > 0.0)) throw StructuralError("target is unnormalizable (all coefficients zero)");
    if (std::abs(n2 - 1.0) > 1e-9) renormalized_ = true;
    coefficients /= std::sqrt(n2);
    for (Eigen::Index i = 0; i < coefficients.rows(); ++i)
        for (Eigen::Index j = 0; j < coefficients.cols(); ++j)
            if (std::abs(coefficients(i, j)) > kNonzero) {
                N_a_ = std::max(N_a_, static_cast<int>(i));
                N_b_ = std::max(N_b_, static_cast<int>(j));
            }
    c_ = coefficients.topLeftCorner(N_a_ + 1, N_b_ + 1);
}

cplx TargetSpec::coefficient(int na, int nb) const {
    if (na < 0 || nb < 0 || na > N_a_ || nb > N_b_) return 0.0;
    return c_(na, nb);
}

StateVector TargetSpec::embed(const HilbertSpace& space) const {
    if (N_a_ > space.na_max()) throw RangeError("n_a", N_a_, space.na_max());
    if (N_b_ > space.nb_max()) throw RangeError("n_b", N_b_, space.nb_max());
    StateVector psi(space);
    for (int na = 0; na <= N_a_; ++na)
        for (int nb = 0; nb <= N_b_; ++nb) psi.at(0, na, nb) = c_(na, nb);
    return psi;
}

TargetSpec make_general_target(const Eigen::MatrixXcd& coefficients) { return TargetSpec(coefficients, "general"); }

TargetSpec make_max_entangled_target(int N) {
    if (N < 0) throw RangeError("N", N, 1 << 20);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    for (int k = 0; k <= N; ++k) c(k, N - k) = 1.0 / std::sqrt(double(N + 1));
    return TargetSpec(c, "max-entangled(" + std::to_string(N) + ")");
}

TargetSpec make_noon_target(int N_a, int N_b) {
    if (N_a < 1) throw RangeError("N_a", N_a, 1 << 20);
    if (N_b < 1) throw RangeError("N_b", N_b, 1 << 20);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(N_a + 1, N_b + 1);
    c(N_a, 0) = c(0, N_b) = 1.0 / std::sqrt(2.0);
    return TargetSpec(c, "noon(" + std::to_string(N_a) + "," + std::to_string(N_b) + ")");
}

TargetSpec make_random_target(int N_a, int N_b, std::mt19937_64& rng, bool real_only) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd c(N_a + 1, N_b + 1);
    for (int i = 0; i <= N_a; ++i)
        for (int j = 0; j <= N_b; ++j) {
            const double re = gauss(rng);
            const double im = real_only ? 0.0 : gauss(rng);
            c(i, j) = {re, im};
        }
    return TargetSpec(c, real_only ? "random-real" : "random");
}

GateCounts GateSequence::counts() const {
    GateCounts c;
    for (const auto& g : gates) {
        switch (gate_kind(g)) {
            case 'A': ++c.a; break;
            case 'B': ++c.b; break;
            default: ++c.r; break;
        }
    }
    return c;
}

std::vector<StateVector> apply_sequence(const std::vector<GateDescriptor>& gates, const HilbertSpace& space) {
    std::vector<StateVector> out;
    out.reserve(gates.size() + 1);
    StateVector psi = StateVector::basis(space, 0, 0, 0);
    out.push_back(psi);
    for (const auto& g : gates) {
        apply_gate(psi, g);
        out.push_back(psi);
    }
    return out;
}

namespace {

void require_within_cutoffs(int N_a, int N_b, const SystemParams& p, int guard) {
    if (N_a > p.na_max - guard)
        throw PreconditionError("target N_a=" + std::to_string(N_a) + " exceeds na_max - guard = " +
                                std::to_string(p.na_max - guard));
    if (N_b > p.nb_max - guard)
        throw PreconditionError("target N_b=" + std::to_string(N_b) + " exceeds nb_max - guard = " +
                                std::to_string(p.nb_max - guard));
}

struct SwapSolution {
    double alpha;     // swap angle in [0, pi) on the pair
    double residual;  // |amplitude left on the zeroed state|
};

// Inverse swap on the pair (g = |0,..,m>, e = |1,..,m-1>): g' = cos(alpha) g + i sin(alpha) e.
// A real alpha can null g only when g and i e share a phase.
SwapSolution solve_swap(cplx g, cplx e) {
    const cplx w = cplx(0.0, 1.0) * e;
    const cplx big = std::abs(g) >= std::abs(w) ? g : w;
    if (std::abs(big) == 0.0) return {0.0, 0.0};
    const cplx u = big / std::abs(big);
    const double gr = (std::conj(u) * g).real();
    const double wr = (std::conj(u) * w).real();
    double alpha = std::atan2(-gr, wr);
    if (alpha < 0.0) alpha += kPi;
    if (alpha >= kPi) alpha -= kPi;
    return {alpha, std::abs(std::cos(alpha) * g + std::sin(alpha) * w)};
}

// R(theta, phi)^dagger on (g, e) leaving zero on e.
GateR clearing_rotation(int n, cplx g, cplx e) {
    if (std::abs(e) < 1e-15) return {n, 0.0, 0.0};
    if (std::abs(g) < 1e-15) return {n, kPi, 0.0};
    const double theta = 2.0 * std::atan2(std::abs(e), std::abs(g));
    return {n, theta, wrap_angle(std::arg(cplx(0.0, 1.0) * e / g))};
}

class InverseBuilder {
public:
    InverseBuilder(StateVector psi, const CompileOptions& o) : psi_(std::move(psi)), o_(o) {}

    void push(const GateDescriptor& g) {
        apply_gate(psi_, g, true);
        inverse_.push_back(g);
    }

    cplx amp(int q, int na, int nb) const { return psi_.at(q, na, nb); }

    // Zeroes |0,col,row> by swapping it into |1,col',row'> (the partner one step
    // down the ladder), then clears the partner's qubit excitation with an R on
    // diagonal n. When the pair is misaligned a corrective R first empties the partner.
    void zero_node(bool b_side, int k, int j, int m, int n) {
        const int gk = k, gj = j;
        const int ek = b_side ? k : k - 1;
        const int ej = b_side ? j - 1 : j;
        SwapSolution s = solve_swap(amp(0, gk, gj), amp(1, ek, ej));
        int tries = 0;
        while (s.residual > o_.alignment_tolerance) {
            if (tries == o_.max_corrections_per_node)
                throw CompilationError("zeroing did not converge", b_side ? j : 0, k, s.residual);
            push(clearing_rotation(n, amp(0, ek, ej), amp(1, ek, ej)));
            corrections_.push_back({b_side ? j : 0, k});
            ++tries;
            s = solve_swap(amp(0, gk, gj), amp(1, ek, ej));
        }
        const double theta = s.alpha / std::sqrt(double(m));
        if (b_side) push(GateB{theta});
        else push(GateA{theta});
        push(clearing_rotation(n, amp(0, ek, ej), amp(1, ek, ej)));
    }

    const StateVector& state() const { return psi_; }
    const std::vector<GateDescriptor>& inverse() const { return inverse_; }
    const std::vector<Correction>& corrections() const { return corrections_; }

private:
    StateVector psi_;
    CompileOptions o_;
    std::vector<GateDescriptor> inverse_;
    std::vector<Correction> corrections_;
};

double off_vacuum_weight(const StateVector& psi) {
    const auto& v = psi.amplitudes();
    return v.tail(v.size() - 1).norm();
}

void finish(GateSequence& seq, const StateVector& target, const HilbertSpace& space, double tol) {
    seq.snapshots = apply_sequence(seq.gates, space);
    const StateVector& out = seq.snapshots.back();
    seq.stats.forward_fidelity = fidelity(out, target);
    seq.stats.excited_amplitude = out.excited_weight();
    if (seq.stats.forward_fidelity < 1.0 - tol)
        throw CompilationError("forward sequence misses the target", 0, 0, 1.0 - seq.stats.forward_fidelity);
}

}  // namespace

GateSequence compile_general(const TargetSpec& target, const SystemParams& p, const CompileOptions& opts) {
    const int Na = target.N_a();
    const int Nb = target.N_b();
    require_within_cutoffs(Na, Nb, p, opts.guard);
    const HilbertSpace space = p.space();
    const StateVector goal = target.embed(space);

    GateSequence seq;
    seq.path = "general";
    seq.N_a = Na;
    seq.N_b = Nb;
    if (Na == 0 && Nb == 0) {
        seq.path = "empty";
        finish(seq, goal, space, opts.residual_tolerance);
        return seq;
    }

    // Inverse evolution: the B rows from the top down, each column right to left,
    // then the single-mode ladder along n_b = 0.
    InverseBuilder inv(goal, opts);
    for (int j = Nb; j >= 1; --j)
        for (int k = Na; k >= 0; --k) inv.zero_node(true, k, j, j, k - j + 1);
    for (int j = Na; j >= 1; --j) inv.zero_node(false, j, 0, j, j - 1);

    seq.stats.corrections = inv.corrections();
    seq.stats.inverse_residual = off_vacuum_weight(inv.state());
    if (seq.stats.inverse_residual > opts.residual_tolerance)
        throw CompilationError("inverse sequence leaves weight off |0,0,0>", 0, 0, seq.stats.inverse_residual);

    seq.gates.assign(inv.inverse().rbegin(), inv.inverse().rend());
    finish(seq, goal, space, opts.residual_tolerance);
    return seq;
}

GateSequence compile_noon(int N_a, int N_b, const SystemParams& p, double relative_phase, const CompileOptions& opts) {
    if (N_a < 1) throw RangeError("N_a", N_a, p.na_max);
    if (N_b < 1) throw RangeError("N_b", N_b, p.nb_max);
    require_within_cutoffs(N_a, N_b, p, opts.guard);
    const HilbertSpace space = p.space();

    GateSequence seq;
    seq.path = "noon";
    seq.N_a = N_a;
    seq.N_b = N_b;
    auto& g = seq.gates;
    g.emplace_back(GateR{0, kPi / 2, 0.0});
    g.emplace_back(GateA{kPi / 2});
    for (int j = 2; j <= N_a; ++j) {
        g.emplace_back(GateR{j - 1, kPi, 0.0});
        g.emplace_back(GateA{kPi / (2 * std::sqrt(double(j)))});
    }
    g.emplace_back(GateR{0, kPi, 0.0});
    g.emplace_back(GateB{kPi / 2});
    for (int j = 2; j <= N_b; ++j) {
        g.emplace_back(GateR{-(j - 1), kPi, 0.0});
        g.emplace_back(GateB{kPi / (2 * std::sqrt(double(j)))});
    }

    // The last R only touches the B branch, so its phase sets the branch phase.
    const StateVector natural = apply_sequence(g, space).back();
    const double alpha0 = std::arg(natural.at(0, 0, N_b) / natural.at(0, N_a, 0));
    std::get<GateR>(g[g.size() - 2]).phi = wrap_angle(relative_phase - alpha0);

    StateVector goal = make_noon_target(N_a, N_b).embed(space);
    goal.at(0, 0, N_b) *= std::exp(cplx(0.0, relative_phase));
    finish(seq, goal, space, opts.residual_tolerance);
    const StateVector& out = seq.snapshots.back();
    seq.relative_phase = std::arg(out.at(0, 0, N_b) / out.at(0, N_a, 0));
    return seq;
}

GateSequence compile_target(const TargetSpec& target, const SystemParams& p, const CompileOptions& opts) {
    const int Na = target.N_a();
    const int Nb = target.N_b();
    if (Na >= 1 && Nb >= 1) {
        int nonzero = 0;
        for (int i = 0; i <= Na; ++i)
            for (int j = 0; j <= Nb; ++j)
                if (std::abs(target.coefficient(i, j)) > kNonzero) ++nonzero;
        const cplx ca = target.coefficient(Na, 0);
        const cplx cb = target.coefficient(0, Nb);
        if (nonzero == 2 && std::abs(ca) > kNonzero && std::abs(std::abs(ca) - std::abs(cb)) < 1e-9)
            return compile_noon(Na, Nb, p, std::arg(cb / ca), opts);
    }
    return compile_general(target, p, opts);
}

namespace {
void require_rates(int N_a, int N_b, const SystemParams& p) {
    if (!(p.Omega > 0.0) || (N_a > 0 && !(p.g_a > 0.0)) || (N_b > 0 && !(p.g_b > 0.0)))
        throw SingularityError("duration estimate needs nonzero rates");
}
}  // namespace

double estimate_duration_general(int N_a, int N_b, const SystemParams& p) {
    require_rates(N_a, N_b, p);
    double sa = 0.0, sb = 0.0;
    for (int j = 1; j <= N_a; ++j) sa += kPi / (2.0 * p.g_a * std::sqrt(double(j)));
    for (int j = 1; j <= N_b; ++j) sb += kPi / (2.0 * p.g_b * std::sqrt(double(j)));
    return (N_a + 1) * (N_b + 1) * kPi / p.Omega + sa + (N_a + 1) * sb;
}

double estimate_duration_noon(int N_a, int N_b, const SystemParams& p) {
    require_rates(N_a, N_b, p);
    double sa = 0.0, sb = 0.0;
    for (int j = 1; j <= N_a; ++j) sa += kPi / (2.0 * p.g_a * std::sqrt(double(j)));
    for (int j = 1; j <= N_b; ++j) sb += kPi / (2.0 * p.g_b * std::sqrt(double(j)));
    return (N_a + N_b - 0.5) * kPi / p.Omega + sa + sb;
}

double gate_time(const std::vector<GateDescriptor>& gates, const SystemParams& p) {
    double t = 0.0;
    for (const auto& g : gates) t += gate_duration(g, p);
    return t;
}

PulseSchedule lower_schedule(const GateSequence& seq, const SystemParams& p, const LoweringOptions& opts) {
    PulseSchedule s;
    s.params = p;
    s.metadata.target = seq.path;
    if (max_selective_amplitude(p).exceeded) s.metadata.warnings.emplace_back("Omega exceeds the selectivity bound delta_omega/2");
    if (!dispersive_validity(p).valid) s.metadata.warnings.emplace_back("dispersive ratio g/detuning reaches 0.3");

    const HilbertSpace space = p.space();
    const auto dim = static_cast<Eigen::Index>(space.dim());
    const auto rd = static_cast<Eigen::Index>(space.resonator_dim());
    Eigen::VectorXd pending = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd stark;
    const bool has_r = std::any_of(seq.gates.begin(), seq.gates.end(),
                                   [&](const auto& g) { return gate_kind(g) == 'R' && !(opts.skip_identity && is_identity(g)); });
    if (opts.frame_compensation && has_r) stark = dressed_shifts(p, p.omega_q);

    auto flush = [&] {
        VirtualPhase v;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double ph = std::remainder(pending[i], 2.0 * kPi);
            if (ph != 0.0) v.table.push_back({space.state(static_cast<std::size_t>(i)), ph});
        }
        if (!v.table.empty()) s.segments.emplace_back(std::move(v));
        pending.setZero();
    };

    if (opts.dressed_drive && has_r && stark.size() == 0) stark = dressed_shifts(p, p.omega_q);
    if (opts.dressed_drive && seq.snapshots.size() != seq.gates.size() + 1)
        throw PreconditionError("dressed drive frequencies need the sequence snapshots");

    auto drive_for = [&](const GateR& r, std::size_t gi) {
        if (!opts.dressed_drive) return diagonal_frequency(p, r.n);
        const StateVector& before = seq.snapshots[gi];
        double best = -1.0;
        int bna = std::max(0, r.n);
        for (int na = std::max(0, r.n); na <= space.na_max() && na - r.n <= space.nb_max(); ++na) {
            const double w = std::norm(before.at(0, na, na - r.n)) + std::norm(before.at(1, na, na - r.n));
            if (w > best) {
                best = w;
                bna = na;
            }
        }
        const auto ig = static_cast<Eigen::Index>(space.index(0, bna, bna - r.n));
        const auto ie = static_cast<Eigen::Index>(space.index(1, bna, bna - r.n));
        return p.omega_q + stark[ie] - stark[ig];
    };

    double t = 0.0;
    int excursions = 0;
    for (std::size_t gi = 0; gi < seq.gates.size(); ++gi) {
        const auto& g = seq.gates[gi];
        if (opts.skip_identity && is_identity(g)) continue;
        const double d = gate_duration(g, p);
        if (const auto* r = std::get_if<GateR>(&g)) {
            if (opts.frame_compensation) {
                pending -= stark * t;
                flush();
            }
            const double wd = drive_for(*r, gi);
            s.segments.emplace_back(Rabi{d, wd, r->phi, p.Omega});
            if (opts.frame_compensation && opts.calibrate_spectators)
                pending -= spectator_phases(p, *r, wd, stark, d);
            t += d;
            if (opts.frame_compensation) pending += stark * t;
            continue;
        }
        const bool a_side = gate_kind(g) == 'A';
        const double w_res = a_side ? p.omega_a : p.omega_b;
        const double D = p.omega_q - w_res;
        const double ramp_phase = D * opts.ramp / 2.0;
        const double t0 = t + opts.ramp;
        const double t1 = t0 + d;
        if (opts.frame_compensation) {
            pending.tail(rd).array() += D * t0 - ramp_phase;
            flush();
        }
        s.segments.emplace_back(Shift{w_res, opts.ramp, 0.0});
        if (a_side) s.segments.emplace_back(ResonantA{d});
        else s.segments.emplace_back(ResonantB{d});
        s.segments.emplace_back(Shift{p.omega_q, opts.ramp, 0.0});
        t = t1 + opts.ramp;
        ++excursions;
        if (opts.frame_compensation) pending.tail(rd).array() -= D * t1 + ramp_phase;
    }
    if (opts.frame_compensation) flush();

    s.metadata.gate_time = gate_time(seq.gates, p);
    s.metadata.shift_overhead = 2.0 * opts.ramp * excursions;
    if (seq.path == "noon") s.metadata.estimated_duration = estimate_duration_noon(seq.N_a, seq.N_b, p);
    else if (seq.path == "general") s.metadata.estimated_duration = estimate_duration_general(seq.N_a, seq.N_b, p);
    return s;
}

void write_target(std::ostream& out, const TargetSpec& t) {
    out << "# n_a n_b re im\n";
    char buf[128];
    for (int na = 0; na <= t.N_a(); ++na)
        for (int nb = 0; nb <= t.N_b(); ++nb) {
            const cplx c = t.coefficient(na, nb);
            if (c == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", na, nb, c.real(), c.imag());
            out << buf;
        }
    if (!out) throw IoError("failed writing target");
}

TargetSpec read_target(std::istream& in) {
    std::map<std::pair<int, int>, cplx> entries;
    int max_a = 0, max_b = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int na, nb;
        double re, im;
        if (!(ls >> na >> nb >> re >> im)) throw IoError("target record malformed on line " + std::to_string(lineno));
        if (na < 0) throw RangeError("n_a", na, 1 << 20);
        if (nb < 0) throw RangeError("n_b", nb, 1 << 20);
        if (!entries.emplace(std::make_pair(na, nb), cplx(re, im)).second)
            throw IoError("duplicate target record on line " + std::to_string(lineno));
        max_a = std::max(max_a, na);
        max_b = std::max(max_b, nb);
    }
    if (entries.empty()) throw StructuralError("target file has no coefficients");
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(max_a + 1, max_b + 1);
    for (const auto& [key, v] : entries) c(key.first, key.second) = v;
    return TargetSpec(c, "file");
}

std::uint64_t snapshot_hash(const StateVector& psi) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](long long x) {
        unsigned char bytes[sizeof x];
        std::memcpy(bytes, &x, sizeof x);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    };
    for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
        mix(std::llround(psi.amplitudes()[i].real() * 1e9));
        mix(std::llround(psi.amplitudes()[i].imag() * 1e9));
    }
    return h;
}

void write_gate_sequence(std::ostream& out, const GateSequence& seq) {
    out << "# kind theta_rad phi_rad n snapshot_hash  (path=" << seq.path << ")\n";
    char buf[160];
    for (std::size_t i = 0; i < seq.gates.size(); ++i) {
        const auto& g = seq.gates[i];
        const std::uint64_t h = i + 1 < seq.snapshots.size() ? snapshot_hash(seq.snapshots[i + 1]) : 0;
        if (const auto* r = std::get_if<GateR>(&g))
            std::snprintf(buf, sizeof buf, "R %.17g %.17g %d %016llx\n", r->theta, r->phi, r->n,
                          static_cast<unsigned long long>(h));
        else
            std::snprintf(buf, sizeof buf, "%c %.17g 0 - %016llx\n", gate_kind(g),
                          std::visit([](const auto& x) { return x.theta; }, g), static_cast<unsigned long long>(h));
        out << buf;
    }
    if (!out) throw IoError("failed writing gate sequence");
}

}  // namespace rqr
