#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace biphoton;
using namespace biphoton::testing;

TEST(ModeSpace, RejectsWindowsOutsideModes) {
    EXPECT_THROW(ModeSpace(2, 2, 0, 2), DimensionError);
    EXPECT_THROW(ModeSpace(2, 2, 3, 2), DimensionError);
    EXPECT_THROW(ModeSpace(2, 2, 2, 3), DimensionError);
    EXPECT_THROW(ModeSpace(0, 2), DimensionError);
    EXPECT_TRUE(ModeSpace(3, 2).lossless());
    EXPECT_FALSE(ModeSpace(3, 2, 2, 2).lossless());
}

TEST(ModeSpace, BasisIndexIsBijective) {
    for (std::size_t m = 1; m <= 8; ++m)
        for (std::size_t mp = 1; mp <= 8; ++mp) {
            const ModeSpace modes(m, mp);
            std::vector<int> seen(modes.dimension(), 0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < mp; ++j) {
                    const auto idx = modes.basis_index(i, j);
                    ASSERT_LT(idx, modes.dimension());
                    ++seen[idx];
                    ASSERT_EQ(modes.unflatten(idx), std::make_pair(i, j));
                }
            for (int c : seen)
                ASSERT_EQ(c, 1);
        }
}

TEST(PureState, FourModeEntangledStateIsValid) {
    const auto s = pure_from_amplitudes(ModeSpace(2, 2), entangled_amplitudes(), Normalization::strict);
    EXPECT_NEAR(s.amplitudes().squaredNorm(), 1.0, 1e-12);
}

TEST(PureState, SingleModePair) {
    CMatrix a(1, 1);
    a << 1.0;
    const auto s = pure_from_amplitudes(ModeSpace(1, 1), a);
    EXPECT_EQ(s.amplitudes()(0, 0), Complex(1.0));
}

TEST(PureState, NormalizationPolicy) {
    const ModeSpace modes(2, 2);
    const CMatrix twice = 2.0 * diag2(1.0, 0.0);
    EXPECT_THROW(pure_from_amplitudes(modes, twice, Normalization::strict), PhysicsError);
    EXPECT_THROW(pure_from_amplitudes(modes, twice), PhysicsError);
    EXPECT_THROW(pure_from_amplitudes(modes, CMatrix::Zero(2, 2)), PhysicsError);
    EXPECT_THROW(pure_from_amplitudes(modes, CMatrix::Identity(3, 2) / std::sqrt(2.0)), DimensionError);

    // Within the tolerant window: renormalized exactly.
    const CMatrix nearly = diag2(1.0 + 4e-10, 0.0);
    const auto s = pure_from_amplitudes(modes, nearly);
    EXPECT_NEAR(s.amplitudes().squaredNorm(), 1.0, 1e-15);
    EXPECT_THROW(pure_from_amplitudes(modes, nearly, Normalization::strict), PhysicsError);
}

TEST(PureState, DiagonalEntangled) {
    const double s = 1.0 / std::sqrt(2.0);
    const auto st = diagonal_entangled(ModeSpace(2, 2), CVector::Constant(2, Complex(s)));
    EXPECT_TRUE(matrices_near(st.amplitudes(), s * CMatrix::Identity(2, 2), 1e-15));

    CVector e1 = CVector::Zero(2);
    e1(0) = 1.0;
    EXPECT_TRUE(matrices_near(diagonal_entangled(ModeSpace(2, 2), e1).amplitudes(), diag2(1.0, 0.0), 0.0));

    const double t = 1.0 / std::sqrt(3.0);
    const auto three = diagonal_entangled(ModeSpace(3, 3), CVector::Constant(3, Complex(t)));
    EXPECT_TRUE(matrices_near(three.amplitudes(), t * CMatrix::Identity(3, 3), 1e-15));

    EXPECT_THROW(diagonal_entangled(ModeSpace(2, 3), CVector::Constant(2, Complex(s))), DimensionError);
    EXPECT_THROW(diagonal_entangled(ModeSpace(2, 2), CVector::Zero(2)), PhysicsError);
}

TEST(DensityState, FromFourModeEntangledState) {
    const auto s = pure_from_amplitudes(ModeSpace(2, 2), entangled_amplitudes());
    const auto rho = density_from_pure(s);
    // Outer product of (1, 1, 1, -1)/2 with itself, i-major order.
    CMatrix expected(4, 4);
    expected << 0.25, 0.25, 0.25, -0.25, 0.25, 0.25, 0.25, -0.25, 0.25, 0.25, 0.25, -0.25, -0.25, -0.25, -0.25, 0.25;
    EXPECT_TRUE(matrices_near(rho.matrix(), expected, 1e-15));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
    EXPECT_NEAR(es.eigenvalues()(3), 1.0, 1e-12);
    EXPECT_NEAR(es.eigenvalues().head(3).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(DensityState, ProductBasisState) {
    const auto rho = density_from_pure(pure_from_amplitudes(ModeSpace(2, 2), diag2(1.0, 0.0)));
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    EXPECT_TRUE(matrices_near(rho.matrix(), expected, 0.0));
}

TEST(DensityState, RejectsInvalidMatrices) {
    const ModeSpace modes(1, 2);
    CMatrix not_unit_trace = CMatrix::Identity(2, 2);
    EXPECT_THROW(BiphotonDensityState(modes, not_unit_trace), PhysicsError);
    CMatrix non_hermitian = 0.5 * CMatrix::Identity(2, 2);
    non_hermitian(0, 1) = 0.1;
    EXPECT_THROW(BiphotonDensityState(modes, non_hermitian), PhysicsError);
    CMatrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    EXPECT_THROW(BiphotonDensityState(modes, negative), PhysicsError);
    EXPECT_THROW(BiphotonDensityState(ModeSpace(2, 2), CMatrix::Identity(2, 2) / 2.0), DimensionError);
}

TEST(Ensemble, SingleProductTermMatchesPureState) {
    const ModeSpace modes(2, 2);
    const CMatrix p = diag2(1.0, 0.0);
    const ClassicalEnsemble ens(modes, {EnsembleTerm{1.0, p, p}});
    const auto from_pure = density_from_pure(pure_from_amplitudes(modes, p));
    EXPECT_TRUE(matrices_near(density_from_ensemble(ens).matrix(), from_pure.matrix(), 0.0));
}

TEST(Ensemble, DiagonalTermsGiveDiagonalDensity) {
    const ModeSpace modes(2, 2);
    const ClassicalEnsemble ens(modes, {EnsembleTerm{0.5, diag2(1.0, 0.0), diag2(1.0, 0.0)},
                                        EnsembleTerm{0.5, diag2(0.0, 1.0), diag2(0.0, 1.0)}});
    const CMatrix rho = density_from_ensemble(ens).matrix();
    CMatrix off = rho;
    off.diagonal().setZero();
    EXPECT_EQ(max_abs(off), 0.0);
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(3, 3).real(), 0.5, 1e-15);
}

TEST(Ensemble, RejectsBadTerms) {
    const ModeSpace modes(2, 2);
    const CMatrix p = diag2(1.0, 0.0);
    EXPECT_THROW(ClassicalEnsemble(modes, {EnsembleTerm{0.5, p, p}}), PhysicsError);
    EXPECT_THROW(ClassicalEnsemble(modes, {EnsembleTerm{-1.0, p, -p}}), PhysicsError);
    EXPECT_THROW(ClassicalEnsemble(modes, {EnsembleTerm{1.0, p, CMatrix::Identity(3, 3)}}), DimensionError);
    EXPECT_THROW(ClassicalEnsemble(modes, {}), DimensionError);
}

TEST(Reduced, FourModeStateIsMaximallyMixed) {
    const auto s = pure_from_amplitudes(ModeSpace(2, 2), entangled_amplitudes());
    EXPECT_TRUE(matrices_near(reduced_unprimed(s).matrix(), 0.5 * CMatrix::Identity(2, 2), 1e-15));
    EXPECT_TRUE(matrices_near(reduced_unprimed(density_from_pure(s)).matrix(), 0.5 * CMatrix::Identity(2, 2), 1e-15));
}

TEST(Reduced, ProductAndDiagonalStates) {
    const auto prod = pure_from_amplitudes(ModeSpace(2, 2), diag2(1.0, 0.0));
    EXPECT_TRUE(matrices_near(reduced_unprimed(prod).matrix(), diag2(1.0, 0.0), 0.0));

    CVector phi(3);
    phi << Complex(0.6, 0.0), Complex(0.0, 0.64), Complex(0.48, 0.0);
    const auto diag = diagonal_entangled(ModeSpace(3, 3), phi);
    CMatrix expected = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
        expected(i, i) = std::norm(diag.amplitudes()(i, i));
    EXPECT_TRUE(matrices_near(reduced_unprimed(diag).matrix(), expected, 1e-15));
}

TEST(Reduced, PureAndDensityPathsAgreeOnRandomStates) {
    for (std::size_t m = 2; m <= 4; ++m) {
        Rng rng(1000 + m);
        for (int k = 0; k < 100; ++k) {
            const ModeSpace modes(m, m);
            const auto draw = draw_pure_state(modes, rng);
            const auto& s = std::get<BiphotonPureState>(draw.state);
            const ReducedState g = reduced_unprimed(s);
            ASSERT_NEAR(g.matrix().trace().real(), 1.0, 1e-12);
            ASSERT_GE(min_eigenvalue(g.matrix()), -1e-10);
            ASSERT_TRUE(matrices_near(reduced_unprimed(density_from_pure(s)).matrix(), g.matrix(), 1e-12));
        }
    }
}

TEST(Reduced, RandomEnsemblesAreValidDensities) {
    Rng rng(77);
    for (int k = 0; k < 50; ++k) {
        const ModeSpace modes(3, 2);
        std::vector<EnsembleTerm> terms;
        double total = 0.0;
        for (int t = 0; t < 3; ++t) {
            const CMatrix a = complex_gaussian(3, 3, rng);
            const CMatrix b = complex_gaussian(2, 2, rng);
            EnsembleTerm term{1.0, a * a.adjoint(), b * b.adjoint()};
            total += term.unprimed.trace().real() * term.primed.trace().real();
            terms.push_back(std::move(term));
        }
        for (auto& t : terms)
            t.weight = 1.0 / total;
        const auto rho = density_from_ensemble(ClassicalEnsemble(modes, terms));
        ASSERT_LE(hermiticity_deviation(rho.matrix()), 1e-12);
        ASSERT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
        ASSERT_GE(min_eigenvalue(rho.matrix()), -1e-10);
    }
}

TEST(Padding, PureAndDensityEmbeddingsCommute) {
    Rng rng(5);
    const ModeSpace modes(2, 3, 1, 2);
    const auto s = std::get<BiphotonPureState>(draw_pure_state(modes, rng).state);
    const auto a = density_from_pure(padded(s, 4, 5));
    const auto b = padded(density_from_pure(s), 4, 5);
    EXPECT_TRUE(matrices_near(a.matrix(), b.matrix(), 1e-15));
    EXPECT_EQ(a.modes(), ModeSpace(4, 5, 1, 2));
}
