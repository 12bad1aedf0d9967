#include <gtest/gtest.h>

#include <ctred/ctred.hpp>
#include <ctred/fixtures.hpp>
#include <ctred/random.hpp>

#include "oracles.hpp"

using namespace ctred;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

std::vector<cplx> block_spectrum(const ModalDecomposition& md) {
    std::vector<cplx> all;
    for (auto& b : md.blocks)
        for (auto& l : eigenvalues(b.sys.A)) all.push_back(l);
    return all;
}

std::vector<std::size_t> all_blocks(const ModalDecomposition& md) {
    std::vector<std::size_t> k(md.blocks.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = i;
    return k;
}

}  // namespace

TEST(Split, StableHasEmptyUnstablePart) {
    Rng rng(1);
    StateSpace K = random_stable_minimal(4, 1, 1, rng);
    auto sp = split_stable_unstable(K);
    EXPECT_EQ(sp.unstable.order(), 0);
    EXPECT_EQ(sp.stable.order(), 4);
}

TEST(Split, StableExampleController) {
    StateSpace K = fixtures::table1_controller();
    auto sp = split_stable_unstable(K);
    ASSERT_EQ(sp.unstable.order(), 1);
    ASSERT_EQ(sp.stable.order(), 2);
    EXPECT_NEAR(sp.unstable.A(0, 0), 0.2, 1e-12);
    // the antistable mode is already decoupled, so its residue is 0.5 * 0.5
    EXPECT_NEAR(sp.unstable.C(0, 0) * sp.unstable.B(0, 0), 0.25, 1e-12);
    StateSpace Ks = make_system(K.A.topLeftCorner(2, 2), K.B.topRows(2), K.C.leftCols(2), m1(0));
    EXPECT_LE(oracle::grid_mismatch(sp.stable, Ks), 1e-10);
}

TEST(Split, RandomWithTwoAntistableModes) {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        Rng rng(seed);
        StateSpace K = add(random_stable_oscillatory(4, 2, 1, rng), random_modal_system(2, 2, 1, rng, 0.1, 1.5));
        Matrix T = random_orthogonal(6, rng);
        K = similarity(K, T, T.transpose());
        auto sp = split_stable_unstable(K);
        EXPECT_EQ(sp.unstable.order(), 2);
        EXPECT_LE(spectral_abscissa(sp.stable.A), -tol_stab(K.A));
        for (auto& l : eigenvalues(sp.unstable.A)) EXPECT_GT(l.real(), 0);
        EXPECT_LE(oracle::grid_mismatch(add(sp.stable, sp.unstable), K), 1e-7);
    }
}

TEST(Split, AxisPoleRejected) {
    Matrix A = Eigen::Vector2d(-1, 0).asDiagonal();
    StateSpace K = make_system(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2), m1(0));
    try {
        split_stable_unstable(K);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AxisPole);
    }
}

TEST(Modal, DiagonalGivesOneBlockPerEigenvalue) {
    Matrix A = Eigen::Vector3d(-3, -1, -2).asDiagonal();
    StateSpace K = make_system(A, Matrix::Ones(3, 1), Matrix::Ones(1, 3), m1(0));
    auto md = modal_form(K);
    ASSERT_EQ(md.blocks.size(), 3u);
    EXPECT_NEAR(md.blocks[0].lambda.real(), -3, 1e-14);
    EXPECT_NEAR(md.blocks[1].lambda.real(), -2, 1e-14);
    EXPECT_NEAR(md.blocks[2].lambda.real(), -1, 1e-14);
}

TEST(Modal, UnstableExampleController) {
    auto md = modal_form(fixtures::unstable_controller());
    ASSERT_EQ(md.blocks.size(), 3u);
    EXPECT_NEAR(md.blocks[0].lambda.real(), -0.37, 1e-14);
    EXPECT_NEAR(md.blocks[1].lambda.real(), 0.34, 1e-14);
    EXPECT_NEAR(md.blocks[2].lambda.real(), 1.37, 1e-14);
    for (auto& b : md.blocks) EXPECT_EQ(b.sys.order(), 1);
    ASSERT_TRUE(md.blocks[1].importance.has_value());
    EXPECT_NEAR(*md.blocks[1].importance, 1.57 * 0.04 / 0.34, 1e-12);
}

TEST(Modal, ConjugatePairIsOneRealBlock) {
    Matrix A(2, 2);
    A << -1, 2, -2, -1;
    StateSpace K = make_system(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2), m1(0));
    auto md = modal_form(K);
    ASSERT_EQ(md.blocks.size(), 1u);
    EXPECT_EQ(md.blocks[0].sys.order(), 2);
    EXPECT_NEAR(md.blocks[0].lambda.real(), -1, 1e-12);
    EXPECT_NEAR(std::abs(md.blocks[0].lambda.imag()), 2, 1e-12);
}

TEST(Modal, RepeatedEigenvalueClusters) {
    Matrix A(3, 3);
    A << -1, 1, 0, 0, -1, 0, 0, 0, -3;
    StateSpace K = make_system(A, Matrix::Ones(3, 1), Matrix::Ones(1, 3), m1(0));
    auto md = modal_form(K);
    ASSERT_EQ(md.blocks.size(), 2u);
    EXPECT_EQ(md.blocks[0].sys.order(), 1);
    EXPECT_EQ(md.blocks[1].sys.order(), 2);
}

TEST(Modal, ReconstructionAndSpectrum) {
    for (std::uint64_t seed : {10u, 11u, 12u, 13u}) {
        Rng rng(seed);
        StateSpace K = add(random_stable_oscillatory(5, 1, 2, rng), random_modal_system(2, 1, 2, rng, 0.1, 1.5));
        Matrix T = random_orthogonal(7, rng);
        K = similarity(K, T, T.transpose());
        auto md = modal_form(K);
        EXPECT_LE(oracle::grid_mismatch(md.assemble(all_blocks(md)), K), 1e-7);
        EXPECT_LE(oracle::spectrum_distance(block_spectrum(md), eigenvalues(K.A)), 1e-9);
        for (std::size_t i = 1; i < md.blocks.size(); ++i)
            EXPECT_LE(md.blocks[i - 1].lambda.real(), md.blocks[i].lambda.real());
    }
}

TEST(Importance, StableScalar) {
    StateSpace b = make_system(m1(-2), m1(1), m1(1), m1(0));
    EXPECT_NEAR(mode_importance(b), 0.5, 1e-9);
}

TEST(Importance, UnstableScalar) {
    StateSpace b = make_system(m1(0.34), m1(0.04), m1(-1.57), m1(0));
    EXPECT_NEAR(mode_importance(b), 1.57 * 0.04 / 0.34, 1e-14);
}

TEST(Importance, ZeroOutputMatrix) {
    StateSpace b = make_system(m1(-2), m1(1), m1(0), m1(0));
    EXPECT_EQ(mode_importance(b), 0.0);
    b.A = m1(2);
    EXPECT_EQ(mode_importance(b), 0.0);
}

TEST(Importance, ZeroModeRejected) {
    StateSpace b = make_system(m1(0), m1(1), m1(1), m1(0));
    try {
        mode_importance(b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroMode);
    }
}
