#include "rqr/gates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rqr/errors.hpp"

namespace rqr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// 2x2 block [[u00, u01], [u10, u11]] acting on (x, y).
struct Block {
    cplx u00, u01, u10, u11;
};

Block jc_block(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -kI * s, -kI * s, c};
}

Block rabi_block(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {c, -kI * std::exp(-kI * phi) * s, -kI * std::exp(kI * phi) * s, c};
}

void rotate(Eigen::VectorXcd& v, std::size_t ix, std::size_t iy, const Block& b) {
    const auto x = static_cast<Eigen::Index>(ix);
    const auto y = static_cast<Eigen::Index>(iy);
    const cplx vx = v[x];
    const cplx vy = v[y];
    v[x] = b.u00 * vx + b.u01 * vy;
    v[y] = b.u10 * vx + b.u11 * vy;
}

void place(Eigen::MatrixXcd& m, std::size_t ix, std::size_t iy, const Block& b) {
    const auto x = static_cast<Eigen::Index>(ix);
    const auto y = static_cast<Eigen::Index>(iy);
    m(x, x) = b.u00;
    m(x, y) = b.u01;
    m(y, x) = b.u10;
    m(y, y) = b.u11;
}

// Visits every coupled pair of the gate with its 2x2 block. For A/B the pair is
// (|1,n_a,n_b>, |0,n_a+1,n_b>) resp. (|1,n_a,n_b>, |0,n_a,n_b+1>); for R it is
// (|0,n_a,n_b>, |1,n_a,n_b>).
template <class F>
void for_each_pair(const HilbertSpace& sp, const GateDescriptor& g, bool adjoint, F&& f) {
    if (const auto* a = std::get_if<GateA>(&g)) {
        const double theta = adjoint ? -a->theta : a->theta;
        for (int na = 0; na < sp.na_max(); ++na) {
            const Block blk = jc_block(theta * std::sqrt(double(na + 1)));
            for (int nb = 0; nb <= sp.nb_max(); ++nb) f(sp.index(1, na, nb), sp.index(0, na + 1, nb), blk);
        }
    } else if (const auto* b = std::get_if<GateB>(&g)) {
        const double theta = adjoint ? -b->theta : b->theta;
        for (int nb = 0; nb < sp.nb_max(); ++nb) {
            const Block blk = jc_block(theta * std::sqrt(double(nb + 1)));
            for (int na = 0; na <= sp.na_max(); ++na) f(sp.index(1, na, nb), sp.index(0, na, nb + 1), blk);
        }
    } else {
        const auto& r = std::get<GateR>(g);
        const Block blk = rabi_block(r.theta, adjoint ? r.phi + std::numbers::pi : r.phi);
        for (int na = std::max(0, r.n); na <= sp.na_max(); ++na) {
            const int nb = na - r.n;
            if (nb < 0 || nb > sp.nb_max()) continue;
            f(sp.index(0, na, nb), sp.index(1, na, nb), blk);
        }
    }
}

}  // namespace

double wrap_angle(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

DenseOperator gate_matrix(const HilbertSpace& space, const GateDescriptor& g) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
    for_each_pair(space, g, false, [&](std::size_t x, std::size_t y, const Block& b) { place(m, x, y, b); });
    return DenseOperator(space, std::move(m));
}

DenseOperator gate_A(const HilbertSpace& space, double theta) { return gate_matrix(space, GateA{theta}); }
DenseOperator gate_B(const HilbertSpace& space, double theta) { return gate_matrix(space, GateB{theta}); }
DenseOperator gate_R(const HilbertSpace& space, int n, double theta, double phi) {
    return gate_matrix(space, GateR{n, theta, phi});
}

void apply_gate(StateVector& psi, const GateDescriptor& g, bool adjoint) {
    auto& v = psi.amplitudes();
    for_each_pair(psi.space(), g, adjoint, [&](std::size_t x, std::size_t y, const Block& b) { rotate(v, x, y, b); });
}

double gate_duration(const GateDescriptor& g, const SystemParams& p) {
    auto rate = [](double r, const char* what) {
        if (!(r > 0.0)) throw SingularityError(std::string("zero rate for ") + what);
        return r;
    };
    if (const auto* a = std::get_if<GateA>(&g)) return a->theta / rate(p.g_a, "A gate");
    if (const auto* b = std::get_if<GateB>(&g)) return b->theta / rate(p.g_b, "B gate");
    return std::get<GateR>(g).theta / rate(p.Omega, "R gate");
}

bool is_identity(const GateDescriptor& g) {
    return std::visit([](const auto& x) { return x.theta == 0.0; }, g);
}

char gate_kind(const GateDescriptor& g) {
    if (std::holds_alternative<GateA>(g)) return 'A';
    if (std::holds_alternative<GateB>(g)) return 'B';
    return 'R';
}

std::string describe(const GateDescriptor& g) {
    char buf[96];
    if (const auto* r = std::get_if<GateR>(&g))
        std::snprintf(buf, sizeof buf, "R(n=%d, theta=%.6f, phi=%.6f)", r->n, r->theta, r->phi);
    else
        std::snprintf(buf, sizeof buf, "%c(theta=%.6f)", gate_kind(g),
                      std::visit([](const auto& x) { return x.theta; }, g));
    return buf;
}

}  // namespace rqr
