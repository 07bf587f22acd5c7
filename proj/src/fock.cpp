#include "rqr/fock.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rqr/errors.hpp"

namespace rqr {

HilbertSpace::HilbertSpace(int na_max, int nb_max) : na_max_(na_max), nb_max_(nb_max) {
    if (na_max < 0) throw RangeError("na_max", na_max, 1 << 20);
    if (nb_max < 0) throw RangeError("nb_max", nb_max, 1 << 20);
}

bool HilbertSpace::contains(int q, int na, int nb) const {
    return q >= 0 && q <= 1 && na >= 0 && na <= na_max_ && nb >= 0 && nb <= nb_max_;
}

std::size_t HilbertSpace::index(int q, int na, int nb) const {
    if (q < 0 || q > 1) throw RangeError("q", q, 1);
    if (na < 0 || na > na_max_) throw RangeError("n_a", na, na_max_);
    if (nb < 0 || nb > nb_max_) throw RangeError("n_b", nb, nb_max_);
    return static_cast<std::size_t>(q) * resonator_dim() +
           static_cast<std::size_t>(na) * static_cast<std::size_t>(nb_max_ + 1) +
           static_cast<std::size_t>(nb);
}

BasisState HilbertSpace::state(std::size_t i) const {
    if (i >= dim()) throw RangeError("index", static_cast<long>(i), static_cast<long>(dim()) - 1);
    const std::size_t rd = resonator_dim();
    const std::size_t stride = static_cast<std::size_t>(nb_max_ + 1);
    const std::size_t rem = i % rd;
    return {static_cast<int>(i / rd), static_cast<int>(rem / stride), static_cast<int>(rem % stride)};
}

StateVector::StateVector(const HilbertSpace& space)
    : space_(space), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dim()))) {}

StateVector::StateVector(const HilbertSpace& space, Eigen::VectorXcd amplitudes)
    : space_(space), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != space_.dim())
        throw StructuralError("amplitude vector length " + std::to_string(amps_.size()) +
                              " does not match space dimension " + std::to_string(space_.dim()));
}

StateVector StateVector::basis(const HilbertSpace& space, int q, int na, int nb) {
    StateVector s(space);
    s.at(q, na, nb) = 1.0;
    return s;
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) throw StructuralError("cannot normalize the zero vector");
    amps_ /= n;
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(amps_.squaredNorm() - 1.0) <= tol;
}

double StateVector::excited_weight() const {
    const auto rd = static_cast<Eigen::Index>(space_.resonator_dim());
    return amps_.segment(rd, rd).norm();
}

DenseOperator::DenseOperator(const HilbertSpace& space, Eigen::MatrixXcd matrix)
    : space_(space), m_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(space_.dim());
    if (m_.rows() != d || m_.cols() != d)
        throw StructuralError("operator shape does not match space dimension");
}

DenseOperator DenseOperator::identity(const HilbertSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    return DenseOperator(space, Eigen::MatrixXcd::Identity(d, d));
}

StateVector DenseOperator::apply(const StateVector& psi) const {
    if (!(psi.space() == space_)) throw StructuralError("state and operator live in different spaces");
    return StateVector(space_, m_ * psi.amplitudes());
}

DenseOperator DenseOperator::operator*(const DenseOperator& rhs) const {
    if (!(rhs.space_ == space_)) throw StructuralError("operators live in different spaces");
    return DenseOperator(space_, m_ * rhs.m_);
}

DenseOperator DenseOperator::adjoint() const { return DenseOperator(space_, m_.adjoint()); }

double DenseOperator::hermiticity_error() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DenseOperator::unitarity_error() const {
    const auto d = m_.rows();
    return (m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

bool DenseOperator::is_hermitian(double tol) const { return hermiticity_error() <= tol; }
bool DenseOperator::is_unitary(double tol) const { return unitarity_error() <= tol; }

LadderOperators build_ladder_operators(const HilbertSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(d, d);
    for (int q = 0; q <= 1; ++q)
        for (int na = 0; na <= space.na_max(); ++na)
            for (int nb = 0; nb <= space.nb_max(); ++nb) {
                const auto i = static_cast<Eigen::Index>(space.index(q, na, nb));
                if (na > 0)
                    a(static_cast<Eigen::Index>(space.index(q, na - 1, nb)), i) = std::sqrt(double(na));
                if (nb > 0)
                    b(static_cast<Eigen::Index>(space.index(q, na, nb - 1)), i) = std::sqrt(double(nb));
                if (q == 1) sm(static_cast<Eigen::Index>(space.index(0, na, nb)), i) = 1.0;
            }
    return {DenseOperator(space, a),  DenseOperator(space, a.adjoint()),
            DenseOperator(space, b),  DenseOperator(space, b.adjoint()),
            DenseOperator(space, sm.adjoint()), DenseOperator(space, sm)};
}

double fidelity(const StateVector& psi, const StateVector& phi) {
    if (!(psi.space() == phi.space())) throw StructuralError("fidelity between different spaces");
    return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

Eigen::MatrixXcd partial_trace_qubit(const StateVector& psi) {
    const auto rd = static_cast<Eigen::Index>(psi.space().resonator_dim());
    const Eigen::VectorXcd g = psi.amplitudes().head(rd);
    const Eigen::VectorXcd e = psi.amplitudes().tail(rd);
    return g * g.adjoint() + e * e.adjoint();
}

void write_state(std::ostream& out, const StateVector& psi, double threshold) {
    const auto& sp = psi.space();
    out << "# q n_a n_b re im  (na_max=" << sp.na_max() << ", nb_max=" << sp.nb_max() << ")\n";
    char buf[128];
    for (std::size_t i = 0; i < sp.dim(); ++i) {
        const cplx c = psi[i];
        if (std::abs(c) < threshold) continue;
        const BasisState s = sp.state(i);
        std::snprintf(buf, sizeof buf, "%d %d %d %.17g %.17g\n", s.q, s.na, s.nb, c.real(), c.imag());
        out << buf;
    }
    if (!out) throw IoError("failed writing state");
}

StateVector read_state(std::istream& in, const HilbertSpace& space) {
    StateVector psi(space);
    std::vector<bool> seen(space.dim(), false);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int q, na, nb;
        double re, im;
        if (!(ls >> q >> na >> nb >> re >> im))
            throw IoError("state record malformed on line " + std::to_string(lineno));
        const std::size_t i = space.index(q, na, nb);
        if (seen[i]) throw IoError("duplicate state record on line " + std::to_string(lineno));
        seen[i] = true;
        psi[i] = {re, im};
    }
    return psi;
}

}  // namespace rqr
