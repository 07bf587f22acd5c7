#include "rqr/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "rqr/errors.hpp"

namespace rqr {

DenseOperator build_hamiltonian(const SystemParams& p, double omega_q, const std::optional<Drive>& drive,
                                Frame frame, double t) {
    const HilbertSpace sp = p.space();
    const auto d = static_cast<Eigen::Index>(sp.dim());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
    auto ix = [&](int q, int na, int nb) { return static_cast<Eigen::Index>(sp.index(q, na, nb)); };

    for (int q = 0; q <= 1; ++q)
        for (int na = 0; na <= sp.na_max(); ++na)
            for (int nb = 0; nb <= sp.nb_max(); ++nb)
                H(ix(q, na, nb), ix(q, na, nb)) =
                    (omega_q - frame.omega) * q + (p.omega_a - frame.omega) * na + (p.omega_b - frame.omega) * nb;

    for (int na = 0; na <= sp.na_max(); ++na)
        for (int nb = 0; nb <= sp.nb_max(); ++nb) {
            const auto e = ix(1, na, nb);
            if (na < sp.na_max()) {
                const double c = p.g_a * std::sqrt(double(na + 1));
                H(ix(0, na + 1, nb), e) = c;
                H(e, ix(0, na + 1, nb)) = c;
            }
            if (nb < sp.nb_max()) {
                const double c = p.g_b * std::sqrt(double(nb + 1));
                H(ix(0, na, nb + 1), e) = c;
                H(e, ix(0, na, nb + 1)) = c;
            }
            if (drive && drive->amplitude != 0.0) {
                const cplx el = 0.5 * drive->amplitude *
                                std::exp(cplx(0.0, drive->phase - (drive->omega_d - frame.omega) * t));
                H(e, ix(0, na, nb)) = el;
                H(ix(0, na, nb), e) = std::conj(el);
            }
        }
    return DenseOperator(sp, std::move(H));
}

Eigen::VectorXd excitation_numbers(const HilbertSpace& space) {
    Eigen::VectorXd n(static_cast<Eigen::Index>(space.dim()));
    for (std::size_t i = 0; i < space.dim(); ++i) {
        const BasisState s = space.state(i);
        n[static_cast<Eigen::Index>(i)] = s.q + s.na + s.nb;
    }
    return n;
}

ConstantPropagator::ConstantPropagator(const DenseOperator& H) : space_(H.space()) {
    const double scale = std::max(1.0, H.matrix().cwiseAbs().maxCoeff());
    if (H.hermiticity_error() > 1e-12 * scale)
        throw StructuralError("propagate_constant requires a Hermitian Hamiltonian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed", 0);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

StateVector ConstantPropagator::apply(const StateVector& psi, double t) const {
    if (!(psi.space() == space_)) throw StructuralError("state and Hamiltonian live in different spaces");
    if (t == 0.0) return psi;
    Eigen::VectorXcd c = evecs_.adjoint() * psi.amplitudes();
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(cplx(0.0, -evals_[k] * t));
    return StateVector(space_, evecs_ * c);
}

StateVector propagate_constant(const DenseOperator& H, const StateVector& psi, double t) {
    return ConstantPropagator(H).apply(psi, t);
}

double expectation(const DenseOperator& H, const StateVector& psi) {
    return psi.amplitudes().dot(H.matrix() * psi.amplitudes()).real();
}

Eigen::VectorXd dressed_shifts(const SystemParams& p, double omega_q) {
    // Rotating at omega_q keeps the eigenvalues small so the shifts keep precision.
    const DenseOperator H = build_hamiltonian(p, omega_q, std::nullopt, Frame::rotating(omega_q));
    const ConstantPropagator prop(H);
    const auto& V = prop.eigenvectors();
    const auto d = V.rows();

    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index i = 0; i < d; ++i)
            if (std::norm(V(i, k)) > 1e-6) pairs.emplace_back(std::norm(V(i, k)), i, k);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

    std::vector<Eigen::Index> eig_of(static_cast<std::size_t>(d), -1);
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    for (const auto& [w, i, k] : pairs) {
        if (eig_of[static_cast<std::size_t>(i)] >= 0 || used[static_cast<std::size_t>(k)]) continue;
        eig_of[static_cast<std::size_t>(i)] = k;
        used[static_cast<std::size_t>(k)] = true;
    }

    Eigen::VectorXd shifts(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index k = eig_of[static_cast<std::size_t>(i)];
        if (k < 0) throw NumericalError("dressed-state assignment failed", 0);
        shifts[i] = prop.energies()[k] - H.matrix()(i, i).real();
    }
    return shifts;
}

}  // namespace rqr
