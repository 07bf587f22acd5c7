#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>

#include <Eigen/Dense>

namespace rqr {

using cplx = std::complex<double>;

struct BasisState {
    int q = 0;
    int na = 0;
    int nb = 0;
    bool operator==(const BasisState&) const = default;
};

// Truncated basis |q, n_a, n_b>, qubit slowest, then n_a, then n_b.
class HilbertSpace {
public:
    HilbertSpace(int na_max, int nb_max);

    int na_max() const { return na_max_; }
    int nb_max() const { return nb_max_; }
    std::size_t dim() const { return 2 * resonator_dim(); }
    std::size_t resonator_dim() const {
        return static_cast<std::size_t>(na_max_ + 1) * static_cast<std::size_t>(nb_max_ + 1);
    }

    std::size_t index(int q, int na, int nb) const;
    std::size_t index(const BasisState& s) const { return index(s.q, s.na, s.nb); }
    BasisState state(std::size_t index) const;
    bool contains(int q, int na, int nb) const;

    bool operator==(const HilbertSpace&) const = default;

private:
    int na_max_;
    int nb_max_;
};

inline std::size_t basis_index(const HilbertSpace& space, int q, int na, int nb) {
    return space.index(q, na, nb);
}

class StateVector {
public:
    explicit StateVector(const HilbertSpace& space);  // zero vector
    StateVector(const HilbertSpace& space, Eigen::VectorXcd amplitudes);

    static StateVector basis(const HilbertSpace& space, int q, int na, int nb);

    const HilbertSpace& space() const { return space_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Eigen::VectorXcd& amplitudes() { return amps_; }

    cplx& operator[](std::size_t i) { return amps_[static_cast<Eigen::Index>(i)]; }
    cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
    cplx& at(int q, int na, int nb) { return (*this)[space_.index(q, na, nb)]; }
    cplx at(int q, int na, int nb) const { return (*this)[space_.index(q, na, nb)]; }

    double norm() const { return amps_.norm(); }
    void normalize();
    bool is_normalized(double tol = 1e-9) const;

    // Norm of the amplitude on |1, n_a, n_b>.
    double excited_weight() const;

private:
    HilbertSpace space_;
    Eigen::VectorXcd amps_;
};

class DenseOperator {
public:
    DenseOperator(const HilbertSpace& space, Eigen::MatrixXcd matrix);
    static DenseOperator identity(const HilbertSpace& space);

    const HilbertSpace& space() const { return space_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    StateVector apply(const StateVector& psi) const;
    DenseOperator operator*(const DenseOperator& rhs) const;
    DenseOperator adjoint() const;

    // Elementwise max |M - M^dagger|.
    double hermiticity_error() const;
    // Max-norm of M^dagger M - I.
    double unitarity_error() const;
    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-9) const;

private:
    HilbertSpace space_;
    Eigen::MatrixXcd m_;
};

struct LadderOperators {
    DenseOperator a, a_dag, b, b_dag, sigma_plus, sigma_minus;
};

LadderOperators build_ladder_operators(const HilbertSpace& space);

double fidelity(const StateVector& psi, const StateVector& phi);

// Reduced density matrix on A (x) B, indexed n_a * (nb_max + 1) + n_b.
Eigen::MatrixXcd partial_trace_qubit(const StateVector& psi);

// Records "q n_a n_b re im", one per line; amplitudes below the threshold are omitted.
void write_state(std::ostream& out, const StateVector& psi, double threshold = 1e-12);
StateVector read_state(std::istream& in, const HilbertSpace& space);

}  // namespace rqr
