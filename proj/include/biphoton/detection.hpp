#pragma once

#include <algorithm>
#include <cstddef>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "biphoton/linalg.hpp"
#include "biphoton/objects.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

/// Detection statistics of one scenario. Vectors are indexed by detected unprimed mode q,
/// `joint` by (q, q') over the detected windows.
struct DetectionReport {
    RVector p1;         ///< unprimed marginal, partner ignored (includes partner loss)
    RVector p1_bar;     ///< bucket marginal: partner detected in any of its detected modes
    RMatrix joint;      ///< coincidence probabilities
    RVector p1_noclick; ///< unprimed click, partner lost
    double p0 = 0.0;    ///< sum of p1_noclick
};

/// Residuals of the report's internal identities.
struct ReportResiduals {
    double bucket_sum = 0.0;     ///< max |p1_bar(q) - sum_q' joint(q, q')|
    double loss_identity = 0.0;  ///< max |p1(q) - p1_bar(q) - p1_noclick(q)|
    double p0_sum = 0.0;         ///< |p0 - sum_q p1_noclick(q)|
    double range_violation = 0.0;

    double max() const { return std::max({bucket_sum, loss_identity, p0_sum, range_violation}); }
};

inline ReportResiduals residuals(const DetectionReport& r) {
    ReportResiduals out;
    out.bucket_sum = (r.p1_bar - r.joint.rowwise().sum()).cwiseAbs().maxCoeff();
    out.loss_identity = (r.p1 - r.p1_bar - r.p1_noclick).cwiseAbs().maxCoeff();
    out.p0_sum = std::abs(r.p0 - r.p1_noclick.sum());
    auto range = [](double x) { return x < 0.0 ? -x : (x > 1.0 ? x - 1.0 : 0.0); };
    for (double x : r.p1)
        out.range_violation = std::max(out.range_violation, range(x));
    for (double x : r.p1_bar)
        out.range_violation = std::max(out.range_violation, range(x));
    for (double x : r.p1_noclick)
        out.range_violation = std::max(out.range_violation, range(x));
    for (Eigen::Index i = 0; i < r.joint.size(); ++i)
        out.range_violation = std::max(out.range_violation, range(r.joint.data()[i]));
    out.range_violation = std::max(out.range_violation, range(r.p0));
    return out;
}

/// Copy of the report with values in [-1e-12, 0) set to 0, for presentation.
inline DetectionReport clamped(DetectionReport r) {
    r.p1 = clamp_small_negatives(r.p1);
    r.p1_bar = clamp_small_negatives(r.p1_bar);
    r.joint = clamp_small_negatives(r.joint);
    r.p1_noclick = clamp_small_negatives(r.p1_noclick);
    if (r.p0 < 0.0 && r.p0 >= -tol::kExact)
        r.p0 = 0.0;
    return r;
}

namespace detail {

inline void check_sides(const ObjectOperator& h1, const ObjectOperator& h2) {
    if (h1.side() != Side::unprimed)
        throw PreconditionError("apply_objects: object 1 must act on the unprimed side");
    if (h2.side() != Side::primed)
        throw PreconditionError("apply_objects: object 2 must act on the primed side");
}

inline void check_fits(const ModeSpace& modes, const ObjectOperator& h1, const ObjectOperator& h2) {
    if (modes.m_unprimed() > h1.dimension() || modes.m_primed() > h2.dimension())
        throw DimensionError("apply_objects: state has " + std::to_string(modes.m_unprimed()) + "x" +
                             std::to_string(modes.m_primed()) + " modes, objects act on " +
                             std::to_string(h1.dimension()) + "x" + std::to_string(h2.dimension()));
}

inline ModeSpace evolved_modes(const ModeSpace& modes, const ObjectOperator& h1, const ObjectOperator& h2) {
    return ModeSpace(h1.dimension(), h2.dimension(), std::min(modes.window_unprimed(), h1.detected_window()),
                     std::min(modes.window_primed(), h2.detected_window()));
}

/// All |1_q, 1_q'> populations as an M x M' matrix.
inline RMatrix populations(const BiphotonPureState& s) { return s.amplitudes().cwiseAbs2(); }

inline RMatrix populations(const BiphotonDensityState& s) {
    const auto m = static_cast<Eigen::Index>(s.modes().m_unprimed());
    const auto mp = static_cast<Eigen::Index>(s.modes().m_primed());
    RMatrix out(m, mp);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < mp; ++j)
            out(i, j) = s.matrix()(i * mp + j, i * mp + j).real();
    return out;
}

} // namespace detail

/// phi -> U1 phi U2^T after zero-padding phi into the objects' mode spaces.
inline BiphotonPureState apply_objects(const BiphotonPureState& state, const ObjectOperator& h1,
                                       const ObjectOperator& h2) {
    detail::check_sides(h1, h2);
    detail::check_fits(state.modes(), h1, h2);
    const ModeSpace modes = detail::evolved_modes(state.modes(), h1, h2);
    const CMatrix phi = zero_pad(state.amplitudes(), h1.matrix().rows(), h2.matrix().rows());
    return BiphotonPureState(detail::Unchecked{}, modes, h1.matrix() * phi * h2.matrix().transpose());
}

/// rho -> (U1 (x) U2) rho (U1 (x) U2)^dagger.
inline BiphotonDensityState apply_objects(const BiphotonDensityState& state, const ObjectOperator& h1,
                                          const ObjectOperator& h2) {
    detail::check_sides(h1, h2);
    detail::check_fits(state.modes(), h1, h2);
    const ModeSpace modes = detail::evolved_modes(state.modes(), h1, h2);
    const BiphotonDensityState embedded = padded(state, h1.dimension(), h2.dimension());
    const CMatrix u = Eigen::kroneckerProduct(h1.matrix(), h2.matrix()).eval();
    return BiphotonDensityState(detail::Unchecked{}, modes, u * embedded.matrix() * u.adjoint());
}

/// joint(q, q') for q < N, q' < N'.
template <class State>
RMatrix joint_distribution(const State& evolved) {
    const auto n = static_cast<Eigen::Index>(evolved.modes().window_unprimed());
    const auto np = static_cast<Eigen::Index>(evolved.modes().window_primed());
    return detail::populations(evolved).topLeftCorner(n, np);
}

/// p1(q) = <1_q| U1 gamma U1^dagger |1_q>, partner photon ignored.
template <class State>
RVector marginal_ignoring_primed(const State& state, const ObjectOperator& h1) {
    if (h1.side() != Side::unprimed)
        throw PreconditionError("marginal_ignoring_primed: object must act on the unprimed side");
    if (state.modes().m_unprimed() > h1.dimension())
        throw DimensionError("marginal_ignoring_primed: state does not fit the object");
    const auto d = static_cast<Eigen::Index>(h1.dimension());
    const CMatrix gamma = zero_pad(reduced_unprimed(state).matrix(), d, d);
    const CMatrix out = h1.matrix() * gamma * h1.matrix().adjoint();
    const auto n = static_cast<Eigen::Index>(std::min(state.modes().window_unprimed(), h1.detected_window()));
    return out.diagonal().real().head(n);
}

/// p1(q) = sum_{i,j} gamma(i,j) h1(q,i) h1*(q,j), evaluated term by term.
inline RVector marginal_via_gamma(const ReducedState& gamma, const ObjectOperator& h1, std::size_t window) {
    const auto dim = static_cast<Eigen::Index>(gamma.dimension());
    if (gamma.dimension() > h1.dimension())
        throw DimensionError("marginal_via_gamma: reduced state does not fit the object");
    const auto n = static_cast<Eigen::Index>(std::min(window, h1.detected_window()));
    const CMatrix& g = gamma.matrix();
    const CMatrix& h = h1.matrix();
    RVector p(n);
    for (Eigen::Index q = 0; q < n; ++q) {
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j)
                acc += g(i, j) * h(q, i) * std::conj(h(q, j));
        p(q) = acc.real();
    }
    return p;
}

inline RVector marginal_via_gamma(const ReducedState& gamma, const ObjectOperator& h1) {
    return marginal_via_gamma(gamma, h1, h1.detected_window());
}

/// p1_bar(q) = sum_{q' < N'} joint(q, q').
template <class State>
RVector bucket_marginal(const State& evolved) {
    return joint_distribution(evolved).rowwise().sum();
}

/// Primed marginal with the unprimed photon ignored, over the primed detected window.
template <class State>
RVector primed_marginal(const State& evolved) {
    const auto np = static_cast<Eigen::Index>(evolved.modes().window_primed());
    return detail::populations(evolved).colwise().sum().transpose().head(np);
}

/// p1_bar(q) = sum_{i,j} phi(i) phi*(j) g2(i,j) h1(q,i) h1*(q,j) for a diagonal-entangled source.
inline RVector bucket_via_gram(const CVector& phi, const GramMatrix& g2, const ObjectOperator& h1) {
    const auto m = phi.size();
    if (static_cast<std::size_t>(m) > g2.dimension() || static_cast<std::size_t>(m) > h1.dimension())
        throw DimensionError("bucket_via_gram: amplitude vector does not fit the objects");
    const auto n = static_cast<Eigen::Index>(h1.detected_window());
    const CMatrix& g = g2.matrix();
    const CMatrix& h = h1.matrix();
    RVector p(n);
    for (Eigen::Index q = 0; q < n; ++q) {
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                acc += phi(i) * std::conj(phi(j)) * g(i, j) * h(q, i) * std::conj(h(q, j));
        p(q) = acc.real();
    }
    return p;
}

/// Diagonal amplitudes phi(i) of a state of the form sum_i phi(i) |1_i, 1_i'>.
inline CVector diagonal_amplitudes(const BiphotonPureState& state) {
    const CMatrix& a = state.amplitudes();
    if (a.rows() != a.cols())
        throw PreconditionError("state is not diagonal-entangled: M != M'");
    CMatrix off = a;
    off.diagonal().setZero();
    if (max_abs(off) > tol::kExact)
        throw PreconditionError("state is not diagonal-entangled: off-diagonal amplitudes present");
    return a.diagonal();
}

inline RVector bucket_via_gram(const BiphotonPureState& state, const GramMatrix& g2, const ObjectOperator& h1) {
    return bucket_via_gram(diagonal_amplitudes(state), g2, h1);
}

/// Full report for an evolved state: p1 from the reduced state, the rest from populations,
/// split by whether the partner lands inside (p1_bar) or outside (p1_noclick) its window.
template <class State>
DetectionReport loss_decomposition(const State& evolved) {
    const ModeSpace& modes = evolved.modes();
    const auto n = static_cast<Eigen::Index>(modes.window_unprimed());
    const auto np = static_cast<Eigen::Index>(modes.window_primed());
    const auto mp = static_cast<Eigen::Index>(modes.m_primed());
    const RMatrix pops = detail::populations(evolved).topRows(n);

    DetectionReport r;
    r.p1 = reduced_unprimed(evolved).matrix().diagonal().real().head(n);
    r.joint = pops.leftCols(np);
    r.p1_bar = r.joint.rowwise().sum();
    r.p1_noclick = mp > np ? RVector(pops.rightCols(mp - np).rowwise().sum()) : RVector::Zero(n);
    r.p0 = r.p1_noclick.sum();
    return r;
}

template <class State>
DetectionReport detect(const State& state, const ObjectOperator& h1, const ObjectOperator& h2) {
    return loss_decomposition(apply_objects(state, h1, h2));
}

} // namespace biphoton
