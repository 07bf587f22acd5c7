#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "rqr/errors.hpp"
#include "rqr/hamiltonian.hpp"
#include "rqr/units.hpp"

using namespace rqr;
using namespace rqr::units;

namespace {

StateVector sample_state(const HilbertSpace& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(std::cos(0.9 * i + 0.1), std::sin(2.3 * i));
    StateVector psi(s, v);
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("diagonal, coupling and drive elements") {
    const SystemParams p = reference_params(2, 2);
    const HilbertSpace s = p.space();
    const Drive d{ghz(7.01), 0.4, mhz(7)};
    const double t = ns(2.5);
    const DenseOperator H = build_hamiltonian(p, p.omega_q, d, Frame::rotating(ghz(7.0)), t);
    const auto& m = H.matrix();
    const double fr = ghz(7.0);
    CHECK(std::abs(m(s.index(1, 1, 2), s.index(1, 1, 2)).real() -
                   ((p.omega_q - fr) + (p.omega_a - fr) + 2 * (p.omega_b - fr))) < 1e-3);
    CHECK(std::abs(m(s.index(1, 1, 0), s.index(0, 2, 0)) - p.g_a * std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(m(s.index(1, 0, 1), s.index(0, 0, 2)) - p.g_b * std::sqrt(2.0)) < 1e-6);
    const cplx expected = 0.5 * d.amplitude * std::exp(cplx(0, d.phase - (d.omega_d - fr) * t));
    CHECK(std::abs(m(s.index(1, 1, 1), s.index(0, 1, 1)) - expected) < 1e-6);
    CHECK(H.is_hermitian());
}

TEST_CASE("single-excitation spectrum matches a direct 3x3 diagonalization") {
    const SystemParams p = reference_params(2, 2);
    for (double wq : {p.omega_a, p.omega_q, p.omega_b}) {
        Eigen::Matrix3d h;
        h << wq, p.g_a, p.g_b, p.g_a, p.omega_a, 0, p.g_b, 0, p.omega_b;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> small(h);
        const ConstantPropagator U(build_hamiltonian(p, wq, std::nullopt));
        const Eigen::VectorXd N = excitation_numbers(p.space());
        std::vector<double> ones;
        for (Eigen::Index i = 0; i < U.energies().size(); ++i) {
            const auto v = U.eigenvectors().col(i);
            double w1 = 0.0;
            for (Eigen::Index k = 0; k < v.size(); ++k)
                if (N[k] == 1.0) w1 += std::norm(v[k]);
            if (w1 > 0.5) ones.push_back(U.energies()[i]);
        }
        REQUIRE(ones.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(ones[k] == doctest::Approx(small.eigenvalues()[k]).epsilon(1e-12));
    }
}

TEST_CASE("vacuum Rabi splitting on resonance") {
    SystemParams p = reference_params(1, 1);
    p.g_b = 0.0;
    const ConstantPropagator U(build_hamiltonian(p, p.omega_a, std::nullopt, Frame::rotating(p.omega_a)));
    // |1,0,0> +- |0,1,0> sit at +- g_a in the frame at omega_a.
    int found = 0;
    for (Eigen::Index i = 0; i < U.energies().size(); ++i)
        if (std::abs(std::abs(U.energies()[i]) - p.g_a) < 1e-3) ++found;
    CHECK(found >= 2);
}

TEST_CASE("resonant exchange maps |1,0,0> to -i|0,1,0>") {
    SystemParams p = reference_params(2, 2);
    p.g_b = 0.0;
    const DenseOperator H = build_hamiltonian(p, p.omega_a, std::nullopt, Frame::rotating(p.omega_a));
    const StateVector out = propagate_constant(H, StateVector::basis(p.space(), 1, 0, 0), std::numbers::pi / (2 * p.g_a));
    CHECK(std::abs(out.at(0, 1, 0) - cplx(0, -1)) < 1e-10);
}

TEST_CASE("eigen propagator agrees with a matrix exponential") {
    const SystemParams p = reference_params(2, 1);
    const DenseOperator H =
        build_hamiltonian(p, p.omega_q, Drive{p.omega_q + mhz(3), 1.1, mhz(7)}, Frame::rotating(p.omega_q + mhz(3)));
    const StateVector psi = sample_state(p.space());
    const double t = ns(37);
    const Eigen::MatrixXcd U = (cplx(0, -t) * H.matrix()).exp();
    const Eigen::VectorXcd oracle = U * psi.amplitudes();
    const StateVector out = propagate_constant(H, psi, t);
    CHECK((out.amplitudes() - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("propagation composes and conserves norm and energy") {
    const SystemParams p = reference_params(2, 2);
    const DenseOperator H = build_hamiltonian(p, p.omega_q, Drive{p.omega_q, 0.0, p.Omega}, Frame::rotating(p.omega_q));
    const ConstantPropagator U(H);
    const StateVector psi = sample_state(p.space());
    const StateVector a = U.apply(U.apply(psi, ns(13)), ns(29));
    const StateVector b = U.apply(psi, ns(42));
    CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(b.norm() - 1.0) < 1e-12);
    CHECK(expectation(H, b) == doctest::Approx(expectation(H, psi)).epsilon(1e-9));
}

TEST_CASE("undriven evolution is frame independent up to exp(-i w N t)") {
    const SystemParams p = reference_params(2, 2);
    const StateVector psi = sample_state(p.space());
    const double t = ns(3), w = ghz(6.8);
    const StateVector lab = propagate_constant(build_hamiltonian(p, p.omega_q, std::nullopt), psi, t);
    StateVector rot = propagate_constant(build_hamiltonian(p, p.omega_q, std::nullopt, Frame::rotating(w)), psi, t);
    const Eigen::VectorXd N = excitation_numbers(p.space());
    for (Eigen::Index i = 0; i < N.size(); ++i) rot.amplitudes()[i] *= std::exp(cplx(0, -w * N[i] * t));
    CHECK((lab.amplitudes() - rot.amplitudes()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("non-Hermitian input is rejected") {
    const HilbertSpace s(1, 1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(ConstantPropagator(DenseOperator(s, m)), StructuralError);
}

TEST_CASE("dressed shifts follow second-order perturbation theory") {
    const SystemParams p = reference_params(3, 3);
    const Eigen::VectorXd d = dressed_shifts(p, p.omega_q);
    const HilbertSpace s = p.space();
    const double da = p.omega_q - p.omega_a, db = p.omega_b - p.omega_q;
    const double ka = p.g_a * p.g_a / da, kb = p.g_b * p.g_b / db;
    CHECK(std::abs(d[0]) < 1e-3);  // vacuum
    for (int na = 0; na <= 2; ++na)
        for (int nb = 0; nb <= 2; ++nb) {
            const double ground = -na * ka + nb * kb;
            const double excited = (na + 1) * ka - (nb + 1) * kb;
            // Fourth-order corrections are ~ (g/Delta)^2 of the shift scale.
            CHECK(std::abs(d[s.index(0, na, nb)] - ground) < 0.1 * ka);
            CHECK(std::abs(d[s.index(1, na, nb)] - excited) < 0.1 * ka);
        }
}
