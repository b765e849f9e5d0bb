#pragma once

#include <gtest/gtest.h>

#include "biphoton/biphoton.hpp"

namespace biphoton::testing {

inline ::testing::AssertionResult matrices_near(const CMatrix& a, const CMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
                                             << b.cols();
    const double d = max_abs(CMatrix(a - b));
    if (d <= tol)
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "max deviation " << d << " > " << tol << "\n" << a << "\nvs\n" << b;
}

inline ::testing::AssertionResult vectors_near(const RVector& a, const RVector& b, double tol) {
    if (a.size() != b.size())
        return ::testing::AssertionFailure() << "length " << a.size() << " vs " << b.size();
    const double d = (a - b).cwiseAbs().maxCoeff();
    if (d <= tol)
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "max deviation " << d << " > " << tol << "\n"
                                         << a.transpose() << "\nvs\n"
                                         << b.transpose();
}

inline RVector rvec(std::initializer_list<double> values) {
    RVector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v(i++) = x;
    return v;
}

inline CMatrix entangled_amplitudes() {
    CMatrix a(2, 2);
    a << 0.5, 0.5, 0.5, -0.5;
    return a;
}

inline CMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix h(2, 2);
    h << s, s, s, -s;
    return h;
}

inline CMatrix diag2(Complex a, Complex b) {
    CMatrix t = CMatrix::Zero(2, 2);
    t(0, 0) = a;
    t(1, 1) = b;
    return t;
}

} // namespace biphoton::testing
