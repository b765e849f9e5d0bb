#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "biphoton/linalg.hpp"
#include "biphoton/random.hpp"

namespace biphoton {

/// Which photon an object acts on.
enum class Side { unprimed, primed };

inline const char* to_string(Side side) { return side == Side::unprimed ? "unprimed" : "primed"; }

/// Passive (sub-unitary) transfer matrix h(q, i) = <1_q| h |1_i>.
class TransferSpec {
public:
    TransferSpec(CMatrix matrix, Side side) : matrix_(std::move(matrix)), side_(side) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
            throw DimensionError("TransferSpec: transfer matrix must be square and non-empty");
        if (largest_singular_value(matrix_) > 1.0 + tol::kCrossPath)
            throw PhysicsError("TransferSpec: singular value exceeds 1 (active object)");
    }

    const CMatrix& matrix() const { return matrix_; }
    Side side() const { return side_; }
    std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

private:
    CMatrix matrix_;
    Side side_;
};

/// Unitary mode transformation of one side. The first `detected_window` output modes are
/// detector eigenmodes; the rest are loss modes.
class ObjectOperator {
public:
    ObjectOperator(CMatrix unitary, Side side, std::size_t detected_window, bool lossy)
        : unitary_(std::move(unitary)), side_(side), window_(detected_window), lossy_(lossy) {
        if (unitary_.rows() != unitary_.cols() || unitary_.rows() == 0)
            throw DimensionError("ObjectOperator: matrix must be square and non-empty");
        if (window_ < 1 || window_ > dimension())
            throw DimensionError("ObjectOperator: detected window must lie in [1, D]");
        const double dev = unitarity_deviation(unitary_);
        if (dev > tol::kCrossPath)
            throw PhysicsError("ObjectOperator: matrix is not unitary (max |U^dagger U - I| = " +
                               std::to_string(dev) + ")");
    }

    const CMatrix& matrix() const { return unitary_; }
    Side side() const { return side_; }
    std::size_t dimension() const { return static_cast<std::size_t>(unitary_.rows()); }
    std::size_t detected_window() const { return window_; }
    bool lossy() const { return lossy_; }

    /// Unitary with every output mode detected.
    bool lossless() const { return !lossy_ && window_ == dimension(); }

    ObjectOperator with_window(std::size_t window) const { return ObjectOperator(unitary_, side_, window, lossy_); }

private:
    CMatrix unitary_;
    Side side_;
    std::size_t window_;
    bool lossy_;
};

/// g(k, l) = sum_{q < W} U(q, k) U*(q, l).
class GramMatrix {
public:
    explicit GramMatrix(CMatrix g) : g_(std::move(g)) {}

    const CMatrix& matrix() const { return g_; }
    std::size_t dimension() const { return static_cast<std::size_t>(g_.rows()); }

private:
    CMatrix g_;
};

inline ObjectOperator identity_object(std::size_t dim, Side side) {
    const auto d = static_cast<Eigen::Index>(dim);
    return ObjectOperator(CMatrix::Identity(d, d), side, dim, false);
}

inline ObjectOperator unitary_from_matrix(const CMatrix& matrix, Side side) {
    if (matrix.rows() != matrix.cols())
        throw DimensionError("unitary_from_matrix: matrix is not square");
    return ObjectOperator(matrix, side, static_cast<std::size_t>(matrix.rows()), false);
}

/// Haar unitary: QR of a Ginibre matrix with R's diagonal phases folded back into Q.
template <class URBG>
ObjectOperator haar_random_unitary(std::size_t dim, URBG& rng, Side side = Side::unprimed) {
    if (dim == 0)
        throw DimensionError("haar_random_unitary: dim must be >= 1");
    const auto d = static_cast<Eigen::Index>(dim);
    const CMatrix ginibre = complex_gaussian(d, d, rng);
    Eigen::HouseholderQR<CMatrix> qr(ginibre);
    CMatrix q = qr.householderQ();
    const CMatrix& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < d; ++k) {
        const double mag = std::abs(r(k, k));
        q.col(k) *= mag == 0.0 ? Complex(1.0) : r(k, k) / mag;
    }
    return ObjectOperator(std::move(q), side, dim, false);
}

inline ObjectOperator haar_random_unitary(std::size_t dim, std::uint64_t seed, Side side = Side::unprimed) {
    Rng rng(seed);
    return haar_random_unitary(dim, rng, side);
}

/// Unitary dilation [[T, sqrt(I - T T^dagger)], [sqrt(I - T^dagger T), -T^dagger]] on 2D modes.
/// Output modes D..2D-1 are loss modes, so the detected window is D.
inline ObjectOperator dilate_lossy(const TransferSpec& spec) {
    const CMatrix& t = spec.matrix();
    const auto d = t.rows();
    const CMatrix eye = CMatrix::Identity(d, d);
    CMatrix u(2 * d, 2 * d);
    u.topLeftCorner(d, d) = t;
    u.topRightCorner(d, d) = psd_sqrt(eye - t * t.adjoint());
    u.bottomLeftCorner(d, d) = psd_sqrt(eye - t.adjoint() * t);
    u.bottomRightCorner(d, d) = -t.adjoint();
    return ObjectOperator(std::move(u), spec.side(), static_cast<std::size_t>(d), true);
}

/// Random passive transfer matrix V diag(s) W^dagger with Haar V, W and s uniform in [0, 1].
template <class URBG>
TransferSpec random_contraction(std::size_t dim, URBG& rng, Side side) {
    const CMatrix v = haar_random_unitary(dim, rng, side).matrix();
    const CMatrix w = haar_random_unitary(dim, rng, side).matrix();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    RVector s(static_cast<Eigen::Index>(dim));
    for (auto& x : s)
        x = uniform(rng);
    return TransferSpec(v * s.cast<Complex>().asDiagonal() * w.adjoint(), side);
}

inline GramMatrix gram_matrix(const ObjectOperator& object) {
    const auto w = static_cast<Eigen::Index>(object.detected_window());
    const auto detected = object.matrix().topRows(w);
    return GramMatrix(detected.transpose() * detected.conjugate());
}

} // namespace biphoton
