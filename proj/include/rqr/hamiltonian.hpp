#pragma once

#include <optional>

#include "rqr/dispersive.hpp"
#include "rqr/fock.hpp"

namespace rqr {

struct Drive {
    double omega_d = 0.0;
    double phase = 0.0;
    double amplitude = 0.0;
};

// Frame co-rotating at `omega` with the excitation number N = s+s- + a'a + b'b.
// omega = 0 is the lab (RWA) frame of the full Hamiltonian. With a drive and
// omega = omega_d the matrix is time independent.
struct Frame {
    double omega = 0.0;
    static Frame lab() { return {0.0}; }
    static Frame rotating(double omega) { return {omega}; }
};

// <1|H|0> drive element is (amplitude/2) exp(i phase) exp(-i (omega_d - frame) t).
DenseOperator build_hamiltonian(const SystemParams& p, double omega_q, const std::optional<Drive>& drive,
                                Frame frame = Frame::lab(), double t = 0.0);

// Excitation number of every basis state.
Eigen::VectorXd excitation_numbers(const HilbertSpace& space);

// Eigendecomposition of a Hermitian H for repeated exp(-iHt) application.
class ConstantPropagator {
public:
    explicit ConstantPropagator(const DenseOperator& H);

    StateVector apply(const StateVector& psi, double t) const;
    const Eigen::VectorXd& energies() const { return evals_; }
    const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }
    const HilbertSpace& space() const { return space_; }

private:
    HilbertSpace space_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

StateVector propagate_constant(const DenseOperator& H, const StateVector& psi, double t);

double expectation(const DenseOperator& H, const StateVector& psi);

// Dressed minus bare energy per basis state for the undriven Hamiltonian with the
// qubit at omega_q. Eigenvectors are matched to bare states by largest overlap.
Eigen::VectorXd dressed_shifts(const SystemParams& p, double omega_q);

}  // namespace rqr
