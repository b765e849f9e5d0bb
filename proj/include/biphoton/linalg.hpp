#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "biphoton/errors.hpp"

namespace biphoton {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kExact = 1e-12;      // single code path identities
inline constexpr double kCrossPath = 1e-10;  // theorem / cross-path checks
inline constexpr double kPsdFloor = -1e-10;  // smallest admissible eigenvalue
inline constexpr double kRenormalize = 1e-9; // silent renormalization window
} // namespace tol

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_deviation(const CMatrix& m) {
    return max_abs(m - m.adjoint());
}

/// Largest |(U^dagger U - I)_{ij}|.
inline double unitarity_deviation(const CMatrix& u) {
    return max_abs(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const CMatrix& m) {
    if (m.size() == 0)
        return 0.0;
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const CMatrix& m) {
    if (m.size() == 0)
        return 0.0;
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

/// Principal square root of a Hermitian PSD matrix; eigenvalues are clamped at 0 first.
inline CMatrix psd_sqrt(const CMatrix& m) {
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
    const RVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

inline double largest_singular_value(const CMatrix& m) {
    if (m.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues().maxCoeff();
}

/// Hermitian, PSD (floor tol::kPsdFloor) check; throws PhysicsError naming `what`.
inline void require_hermitian_psd(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": matrix is not square");
    if (hermiticity_deviation(m) > tol::kExact)
        throw PhysicsError(std::string(what) + ": matrix is not Hermitian");
    if (min_eigenvalue(m) < tol::kPsdFloor)
        throw PhysicsError(std::string(what) + ": matrix is not positive semidefinite");
}

/// Copies `m` into the top-left corner of a zero rows x cols matrix.
inline CMatrix zero_pad(const CMatrix& m, Eigen::Index rows, Eigen::Index cols) {
    if (rows < m.rows() || cols < m.cols())
        throw DimensionError("zero_pad: target is smaller than the source");
    CMatrix out = CMatrix::Zero(rows, cols);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

/// Sets values in [-eps, 0) to exactly 0.
inline RVector clamp_small_negatives(RVector v, double eps = tol::kExact) {
    for (auto& x : v)
        if (x < 0.0 && x >= -eps)
            x = 0.0;
    return v;
}

inline RMatrix clamp_small_negatives(RMatrix m, double eps = tol::kExact) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (m.data()[i] < 0.0 && m.data()[i] >= -eps)
            m.data()[i] = 0.0;
    return m;
}

} // namespace biphoton
