#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/linalg.hpp"
#include "biphoton/modes.hpp"

namespace biphoton {

namespace detail {
/// Tag for constructors that skip validation; used where the value is produced by a
/// norm-preserving map from an already validated state.
struct Unchecked {
    explicit Unchecked() = default;
};
} // namespace detail

enum class Normalization {
    tolerant, ///< renormalize silently when within tol::kRenormalize
    strict,   ///< reject any deviation beyond tol::kExact
};

/// Pure two-photon state sum_{i,j'} phi(i,j') |1_i, 1_j'>.
/// Row index is the unprimed mode, column index the primed mode.
class BiphotonPureState {
public:
    BiphotonPureState(ModeSpace modes, CMatrix amplitudes) : modes_(modes), amplitudes_(std::move(amplitudes)) {
        check_shape();
        if (std::abs(amplitudes_.squaredNorm() - 1.0) > tol::kExact)
            throw PhysicsError("BiphotonPureState: amplitudes are not normalized");
    }

    BiphotonPureState(detail::Unchecked, ModeSpace modes, CMatrix amplitudes)
        : modes_(modes), amplitudes_(std::move(amplitudes)) {
        check_shape();
    }

    const ModeSpace& modes() const { return modes_; }
    const CMatrix& amplitudes() const { return amplitudes_; }

    /// Amplitudes flattened in the i-major basis order.
    CVector flattened() const {
        CVector v(static_cast<Eigen::Index>(modes_.dimension()));
        for (std::size_t i = 0; i < modes_.m_unprimed(); ++i)
            for (std::size_t j = 0; j < modes_.m_primed(); ++j)
                v(static_cast<Eigen::Index>(modes_.basis_index(i, j))) = amplitudes_(i, j);
        return v;
    }

private:
    void check_shape() const {
        if (static_cast<std::size_t>(amplitudes_.rows()) != modes_.m_unprimed() ||
            static_cast<std::size_t>(amplitudes_.cols()) != modes_.m_primed())
            throw DimensionError("BiphotonPureState: amplitude matrix is " + std::to_string(amplitudes_.rows()) +
                                 "x" + std::to_string(amplitudes_.cols()) + ", modes require " +
                                 std::to_string(modes_.m_unprimed()) + "x" + std::to_string(modes_.m_primed()));
    }

    ModeSpace modes_;
    CMatrix amplitudes_;
};

/// Density operator on span{|1_i, 1_j'>}, basis index i * M' + j.
class BiphotonDensityState {
public:
    BiphotonDensityState(ModeSpace modes, CMatrix matrix) : modes_(modes), matrix_(std::move(matrix)) {
        check_shape();
        if (std::abs(matrix_.trace() - Complex(1.0)) > tol::kExact)
            throw PhysicsError("BiphotonDensityState: trace is not 1");
        require_hermitian_psd(matrix_, "BiphotonDensityState");
    }

    BiphotonDensityState(detail::Unchecked, ModeSpace modes, CMatrix matrix)
        : modes_(modes), matrix_(std::move(matrix)) {
        check_shape();
    }

    const ModeSpace& modes() const { return modes_; }
    const CMatrix& matrix() const { return matrix_; }

private:
    void check_shape() const {
        const auto dim = static_cast<Eigen::Index>(modes_.dimension());
        if (matrix_.rows() != dim || matrix_.cols() != dim)
            throw DimensionError("BiphotonDensityState: matrix must be " + std::to_string(dim) + "x" +
                                 std::to_string(dim));
    }

    ModeSpace modes_;
    CMatrix matrix_;
};

/// Single-photon state of the unprimed photon, gamma(i,j) = <1_i| Tr_2 rho |1_j>.
class ReducedState {
public:
    explicit ReducedState(CMatrix gamma) : gamma_(std::move(gamma)) {
        require_hermitian_psd(gamma_, "ReducedState");
        if (std::abs(gamma_.trace() - Complex(1.0)) > tol::kExact)
            throw PhysicsError("ReducedState: trace is not 1");
    }

    const CMatrix& matrix() const { return gamma_; }
    std::size_t dimension() const { return static_cast<std::size_t>(gamma_.rows()); }

private:
    CMatrix gamma_;
};

struct EnsembleTerm {
    double weight;
    CMatrix unprimed;
    CMatrix primed;
};

/// Separable mixture sum_k w_k A_k (x) B_k. Components need not be trace-normalized;
/// only the total trace is fixed.
class ClassicalEnsemble {
public:
    ClassicalEnsemble(ModeSpace modes, std::vector<EnsembleTerm> terms) : modes_(modes), terms_(std::move(terms)) {
        if (terms_.empty())
            throw DimensionError("ClassicalEnsemble: no terms");
        double total = 0.0;
        for (const auto& t : terms_) {
            if (static_cast<std::size_t>(t.unprimed.rows()) != modes_.m_unprimed() ||
                static_cast<std::size_t>(t.primed.rows()) != modes_.m_primed())
                throw DimensionError("ClassicalEnsemble: component operator does not match the mode space");
            if (!(t.weight >= 0.0))
                throw PhysicsError("ClassicalEnsemble: negative weight");
            require_hermitian_psd(t.unprimed, "ClassicalEnsemble unprimed component");
            require_hermitian_psd(t.primed, "ClassicalEnsemble primed component");
            total += t.weight * t.unprimed.trace().real() * t.primed.trace().real();
        }
        if (std::abs(total - 1.0) > tol::kCrossPath)
            throw PhysicsError("ClassicalEnsemble: total trace " + std::to_string(total) + " is not 1");
    }

    const ModeSpace& modes() const { return modes_; }
    const std::vector<EnsembleTerm>& terms() const { return terms_; }

    double total_trace() const {
        double total = 0.0;
        for (const auto& t : terms_)
            total += t.weight * t.unprimed.trace().real() * t.primed.trace().real();
        return total;
    }

private:
    ModeSpace modes_;
    std::vector<EnsembleTerm> terms_;
};

// ---------------------------------------------------------------------------
// construction

inline BiphotonPureState pure_from_amplitudes(const ModeSpace& modes, const CMatrix& amplitudes,
                                              Normalization policy = Normalization::tolerant) {
    if (static_cast<std::size_t>(amplitudes.rows()) != modes.m_unprimed() ||
        static_cast<std::size_t>(amplitudes.cols()) != modes.m_primed())
        throw DimensionError("pure_from_amplitudes: amplitude shape does not match the mode space");
    const double norm2 = amplitudes.squaredNorm();
    if (norm2 == 0.0)
        throw PhysicsError("pure_from_amplitudes: zero amplitude matrix");
    const double deviation = std::abs(norm2 - 1.0);
    if (policy == Normalization::strict) {
        if (deviation > tol::kExact)
            throw PhysicsError("pure_from_amplitudes: squared norm " + std::to_string(norm2) + " is not 1");
        return BiphotonPureState(modes, amplitudes);
    }
    if (deviation > tol::kRenormalize)
        throw PhysicsError("pure_from_amplitudes: squared norm " + std::to_string(norm2) + " is not 1");
    return BiphotonPureState(modes, amplitudes / std::sqrt(norm2));
}

/// phi(i, j') = phi(i) delta_{i j'}.
inline BiphotonPureState diagonal_entangled(const ModeSpace& modes, const CVector& phi) {
    if (modes.m_unprimed() != modes.m_primed())
        throw DimensionError("diagonal_entangled: requires M == M'");
    if (static_cast<std::size_t>(phi.size()) != modes.m_unprimed())
        throw DimensionError("diagonal_entangled: amplitude vector length does not match M");
    const double norm2 = phi.squaredNorm();
    if (norm2 == 0.0)
        throw PhysicsError("diagonal_entangled: zero amplitude vector");
    if (std::abs(std::sqrt(norm2) - 1.0) > tol::kRenormalize)
        throw PhysicsError("diagonal_entangled: amplitude vector is not normalized");
    const CVector normalized = phi / std::sqrt(norm2);
    return BiphotonPureState(modes, normalized.asDiagonal().toDenseMatrix());
}

inline BiphotonDensityState density_from_pure(const BiphotonPureState& state) {
    const CVector v = state.flattened();
    return BiphotonDensityState(state.modes(), v * v.adjoint());
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline BiphotonDensityState density_from_ensemble(const ClassicalEnsemble& ensemble) {
    const auto dim = static_cast<Eigen::Index>(ensemble.modes().dimension());
    CMatrix rho = CMatrix::Zero(dim, dim);
    for (const auto& t : ensemble.terms())
        rho += t.weight * kron(t.unprimed, t.primed);
    const Complex trace = rho.trace();
    if (std::abs(trace - Complex(1.0)) > tol::kCrossPath)
        throw PhysicsError("density_from_ensemble: total trace is not 1");
    rho /= trace.real();
    return BiphotonDensityState(ensemble.modes(), std::move(rho));
}

// ---------------------------------------------------------------------------
// partial traces

/// gamma = phi phi^dagger.
inline ReducedState reduced_unprimed(const BiphotonPureState& state) {
    return ReducedState(state.amplitudes() * state.amplitudes().adjoint());
}

inline ReducedState reduced_unprimed(const BiphotonDensityState& state) {
    const auto m = static_cast<Eigen::Index>(state.modes().m_unprimed());
    const auto mp = static_cast<Eigen::Index>(state.modes().m_primed());
    CMatrix gamma = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index k = 0; k < mp; ++k)
                gamma(i, j) += state.matrix()(i * mp + k, j * mp + k);
    return ReducedState(std::move(gamma));
}

/// Reduced state of the primed photon (trace over unprimed modes).
inline CMatrix reduced_primed(const BiphotonPureState& state) {
    return state.amplitudes().transpose() * state.amplitudes().conjugate();
}

inline CMatrix reduced_primed(const BiphotonDensityState& state) {
    const auto m = static_cast<Eigen::Index>(state.modes().m_unprimed());
    const auto mp = static_cast<Eigen::Index>(state.modes().m_primed());
    CMatrix out = CMatrix::Zero(mp, mp);
    for (Eigen::Index j = 0; j < mp; ++j)
        for (Eigen::Index l = 0; l < mp; ++l)
            for (Eigen::Index i = 0; i < m; ++i)
                out(j, l) += state.matrix()(i * mp + j, i * mp + l);
    return out;
}

// ---------------------------------------------------------------------------
// embedding into loss-extended mode spaces

/// Embeds the state into the first modes of a larger space; windows are kept.
inline BiphotonPureState padded(const BiphotonPureState& state, std::size_t m_unprimed, std::size_t m_primed) {
    const ModeSpace modes = state.modes().extended(m_unprimed, m_primed);
    return BiphotonPureState(detail::Unchecked{}, modes,
                             zero_pad(state.amplitudes(), static_cast<Eigen::Index>(m_unprimed),
                                      static_cast<Eigen::Index>(m_primed)));
}

inline BiphotonDensityState padded(const BiphotonDensityState& state, std::size_t m_unprimed,
                                   std::size_t m_primed) {
    const ModeSpace& from = state.modes();
    if (m_unprimed == from.m_unprimed() && m_primed == from.m_primed())
        return state;
    const ModeSpace to = from.extended(m_unprimed, m_primed);
    const auto dim = static_cast<Eigen::Index>(to.dimension());
    CMatrix out = CMatrix::Zero(dim, dim);
    for (std::size_t a = 0; a < from.dimension(); ++a) {
        const auto [i, j] = from.unflatten(a);
        for (std::size_t b = 0; b < from.dimension(); ++b) {
            const auto [k, l] = from.unflatten(b);
            out(static_cast<Eigen::Index>(to.basis_index(i, j)), static_cast<Eigen::Index>(to.basis_index(k, l))) =
                state.matrix()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    }
    return BiphotonDensityState(detail::Unchecked{}, to, std::move(out));
}

} // namespace biphoton
