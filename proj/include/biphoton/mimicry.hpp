#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "biphoton/detection.hpp"
#include "biphoton/objects.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

namespace detail {

/// sigma = (U1 (x) I) rho (U1 (x) I)^dagger, then B_i(j', k') = sigma[(i, j'), (i, k')].
inline std::vector<CMatrix> unprimed_conditional_blocks(const BiphotonDensityState& rho, const CMatrix& u1) {
    const auto m = static_cast<Eigen::Index>(rho.modes().m_unprimed());
    const auto mp = static_cast<Eigen::Index>(rho.modes().m_primed());
    const CMatrix lifted = kron(u1, CMatrix::Identity(mp, mp));
    const CMatrix sigma = lifted * rho.matrix() * lifted.adjoint();
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
        blocks.emplace_back(sigma.block(i * mp, i * mp, mp, mp));
    return blocks;
}

} // namespace detail

/// Separable state sum_i U1^dagger|1_i><1_i|U1 (x) <1_i|U1 rho U1^dagger|1_i> whose joint
/// statistics behind a lossless object 1 and any object 2 equal those of rho.
inline ClassicalEnsemble holography_mimic(const BiphotonDensityState& rho, const ObjectOperator& h1) {
    if (h1.side() != Side::unprimed)
        throw PreconditionError("holography_mimic: reference object must act on the unprimed side");
    if (!h1.lossless())
        throw PreconditionError("holography_mimic: reference object must be lossless");
    if (rho.modes().m_unprimed() > h1.dimension())
        throw DimensionError("holography_mimic: state does not fit the reference object");
    const BiphotonDensityState embedded = padded(rho, h1.dimension(), rho.modes().m_primed());
    const CMatrix& u1 = h1.matrix();
    const auto blocks = detail::unprimed_conditional_blocks(embedded, u1);

    std::vector<EnsembleTerm> terms;
    terms.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const CVector v = u1.row(static_cast<Eigen::Index>(i)).adjoint();
        CMatrix primed = 0.5 * (blocks[i] + blocks[i].adjoint());
        terms.push_back(EnsembleTerm{1.0, v * v.adjoint(), std::move(primed)});
    }
    return ClassicalEnsemble(embedded.modes(), std::move(terms));
}

inline ClassicalEnsemble holography_mimic(const BiphotonPureState& state, const ObjectOperator& h1) {
    return holography_mimic(density_from_pure(state), h1);
}

struct ProductMimic {
    ClassicalEnsemble ensemble;
    double p0;                 ///< probability the primed photon escapes detection
    std::size_t spare_mode;    ///< zero-based undetected primed mode carrying the loss weight
    bool physically_accessible; ///< no primed excitation outside the detected window
};

/// Uncorrelated product state
///   [sum_{j' < N'} <1_j'|U2 rho U2^dagger|1_j'>] (x) U2^dagger (|1_0'><1_0'| + P0/(1-P0) |1_s'><1_s'|) U2
/// reproducing the bucket marginal of rho for any object 1. `spare_mode` is zero-based and
/// defaults to the last primed mode.
inline ProductMimic lossy_product_mimic(const BiphotonDensityState& rho, const ObjectOperator& h2,
                                        std::optional<std::size_t> spare_mode = std::nullopt) {
    if (h2.side() != Side::primed)
        throw PreconditionError("lossy_product_mimic: test object must act on the primed side");
    if (rho.modes().m_primed() > h2.dimension())
        throw DimensionError("lossy_product_mimic: state does not fit the test object");
    const BiphotonDensityState embedded = padded(rho, rho.modes().m_unprimed(), h2.dimension());
    const ModeSpace modes = embedded.modes().with_windows(
        embedded.modes().window_unprimed(), std::min(embedded.modes().window_primed(), h2.detected_window()));
    const auto m = static_cast<Eigen::Index>(modes.m_unprimed());
    const auto mp = static_cast<Eigen::Index>(modes.m_primed());
    const auto np = static_cast<Eigen::Index>(modes.window_primed());

    const std::size_t spare = spare_mode.value_or(modes.m_primed() - 1);
    if (spare >= modes.m_primed())
        throw DimensionError("lossy_product_mimic: spare mode lies outside the primed mode space");
    if (spare_mode && spare < modes.window_primed())
        throw PreconditionError("lossy_product_mimic: spare mode lies inside the detected window");

    const CMatrix lifted = kron(CMatrix::Identity(m, m), h2.matrix());
    const CMatrix sigma = lifted * embedded.matrix() * lifted.adjoint();
    CMatrix unprimed = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < m; ++k)
            for (Eigen::Index j = 0; j < np; ++j)
                unprimed(i, k) += sigma(i * mp + j, k * mp + j);
    unprimed = 0.5 * (unprimed + unprimed.adjoint()).eval();

    const double p0 = 1.0 - unprimed.trace().real();
    if (p0 >= 1.0 - tol::kExact)
        throw PreconditionError("lossy_product_mimic: every primed photon is lost, mimic undefined");

    CMatrix carrier = CMatrix::Zero(mp, mp);
    carrier(0, 0) = 1.0;
    if (p0 > tol::kExact) {
        if (spare < modes.window_primed())
            throw PreconditionError("lossy_product_mimic: no undetected primed mode to carry the loss weight");
        carrier(static_cast<Eigen::Index>(spare), static_cast<Eigen::Index>(spare)) += p0 / (1.0 - p0);
    }
    CMatrix primed = h2.matrix().adjoint() * carrier * h2.matrix();
    primed = 0.5 * (primed + primed.adjoint()).eval();

    double outside = 0.0;
    for (Eigen::Index j = np; j < mp; ++j)
        outside += primed(j, j).real();
    const bool accessible = outside <= tol::kExact;

    std::vector<EnsembleTerm> terms;
    terms.push_back(EnsembleTerm{1.0, std::move(unprimed), std::move(primed)});
    return ProductMimic{ClassicalEnsemble(modes, std::move(terms)), p0, spare, accessible};
}

inline ProductMimic lossy_product_mimic(const BiphotonPureState& state, const ObjectOperator& h2,
                                        std::optional<std::size_t> spare_mode = std::nullopt) {
    return lossy_product_mimic(density_from_pure(state), h2, spare_mode);
}

} // namespace biphoton
