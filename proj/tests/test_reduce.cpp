#include <gtest/gtest.h>

#include <ctred/ctred.hpp>
#include <ctred/fixtures.hpp>
#include <ctred/random.hpp>

#include "oracles.hpp"

using namespace ctred;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

double gramian_mismatch(const BalancedRealization& b) {
    const StateSpace& S = b.system;
    Matrix Wc = oracle::kron_lyapunov(S.A, S.B * S.B.transpose());
    Matrix Wo = oracle::kron_lyapunov(S.A.transpose(), S.C.transpose() * S.C);
    Matrix Sig = Matrix::Zero(S.order(), S.order());
    for (Index i = 0; i < S.order(); ++i) Sig(i, i) = b.hsv[i];
    return std::max((Wc - Sig).norm(), (Wo - Sig).norm()) / b.hsv[0];
}

StateSpace stable_part_of_table1() {
    StateSpace K = fixtures::table1_controller();
    return make_system(K.A.topLeftCorner(2, 2), K.B.topRows(2), K.C.leftCols(2), m1(0));
}

}  // namespace

TEST(Balance, ScalarSymmetric) {
    BalancedRealization b = balance(make_system(m1(-1), m1(1), m1(1), m1(0)));
    ASSERT_EQ(b.hsv.size(), 1u);
    EXPECT_NEAR(b.hsv[0], 0.5, 1e-14);
    EXPECT_NEAR(std::abs(b.T(0, 0)), 1.0, 1e-14);
}

TEST(Balance, StablePartOfExample) {
    BalancedRealization b = balance(stable_part_of_table1());
    ASSERT_EQ(b.hsv.size(), 2u);
    EXPECT_GT(b.hsv[0], b.hsv[1]);
    EXPECT_LE(gramian_mismatch(b), 1e-7);
}

TEST(Balance, RandomGramiansDiagonal) {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        StateSpace S = random_stable_oscillatory(5, 2, 2, rng);
        BalancedRealization b = balance(S);
        EXPECT_LE(gramian_mismatch(b), 1e-7);
        EXPECT_LE(oracle::grid_mismatch(b.system, S), 1e-8);
    }
}

TEST(Balance, HankelValuesSimilarityInvariant) {
    Rng rng(102);
    StateSpace S = random_stable_minimal(5, 1, 1, rng);
    Matrix T = rng.matrix(5, 5) + 4 * Matrix::Identity(5, 5);
    auto a = balance(S).hsv, b = balance(similarity(S, T, T.inverse())).hsv;
    // small values are only accurate relative to the largest one
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-7 * a[0]);
}

TEST(Balance, Errors) {
    try {
        balance(make_system(m1(1), m1(1), m1(1), m1(0)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StabilityPrecondition);
    }
    Matrix A = Eigen::Vector2d(-1, -2).asDiagonal();
    Matrix B(2, 1), C(1, 2);
    B << 1, 0;
    C << 1, 1;
    try {
        balance(make_system(A, B, C, m1(0)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotMinimal);
    }
}

TEST(BalancedTruncate, NegligibleTail) {
    // third Hankel value near 1e-9 sigma_1: a weakly coupled fast mode
    Matrix A = Eigen::Vector3d(-1, -2, -50).asDiagonal();
    Matrix B(3, 1), C(1, 3);
    B << 1, 1, 3e-4;
    C << 1, 1, 3e-4;
    StateSpace S = make_system(A, B, C, m1(0));
    TruncationResult t = balanced_truncate(S, 2);
    double s1 = t.hsv[0];
    EXPECT_LT(t.removed_tail[0], 1e-8 * s1);
    EXPECT_LE(hinf_norm(t.delta), 2 * t.tail_sum() * (1 + 1e-6));
    EXPECT_TRUE(is_hurwitz(t.reduced.A));
}

TEST(BalancedTruncate, ExampleStablePart) {
    TruncationResult t = balanced_truncate(stable_part_of_table1(), 1);
    double e = hinf_norm(t.delta);
    EXPECT_LE(e, 1e-5);
    EXPECT_LE(e, 2 * t.tail_sum() * (1 + 1e-6));
}

TEST(BalancedTruncate, RandomErrorBound) {
    Rng rng(103);
    for (int trial = 0; trial < 10; ++trial) {
        StateSpace S = random_stable_oscillatory(6, 1, 2, rng);
        TruncationResult t = balanced_truncate(S, 3);
        EXPECT_LE(hinf_norm(subtract(S, t.reduced)), 2 * t.tail_sum() * (1 + 1e-6) + 1e-9 * t.hsv[0]);
        EXPECT_LE(oracle::abs_mismatch(t.delta, subtract(t.reduced, S)), 1e-8);
        EXPECT_EQ(t.reduced.order(), 3);
    }
}

TEST(BalancedTruncate, OrderOutOfRange) {
    Rng rng(104);
    StateSpace S = random_stable_minimal(3, 1, 1, rng);
    EXPECT_THROW(balanced_truncate(S, 0), Error);
    EXPECT_THROW(balanced_truncate(S, 3), Error);
}

TEST(BalancedTruncate, TieRejected) {
    // two identical decoupled channels give equal Hankel values
    Matrix A = Eigen::Vector2d(-1, -1).asDiagonal();
    StateSpace S = make_system(A, Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2));
    try {
        balanced_truncate(S, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PartitionTie);
    }
}

TEST(BalancedUnstable, ExampleColumn) {
    StateSpace G = fixtures::table1_plant(), K = fixtures::table1_controller();
    TruncationResult t = balanced_truncate_unstable(K, 2);
    EXPECT_EQ(t.reduced.order(), 2);
    EXPECT_LE(hinf_norm(t.delta), 1e-5);
    EXPECT_NEAR(lqg_cost(G, t.reduced), 8.0552, 0.01 * 8.0552);
}

TEST(BalancedUnstable, StableInputMatchesPlain) {
    Rng rng(105);
    StateSpace S = random_stable_minimal(4, 1, 1, rng);
    TruncationResult a = balanced_truncate_unstable(S, 2), b = balanced_truncate(S, 2);
    EXPECT_LE(oracle::grid_mismatch(a.reduced, b.reduced), 1e-9);
}

TEST(BalancedUnstable, UnstableSpectrumPreserved) {
    for (std::uint64_t seed : {106u, 107u, 108u}) {
        Rng rng(seed);
        StateSpace K = add(random_stable_minimal(4, 1, 1, rng), random_modal_system(1, 1, 1, rng, 0.1, 1.5));
        TruncationResult t = balanced_truncate_unstable(K, 4);
        std::vector<cplx> uk, ur;
        for (auto& l : eigenvalues(K.A))
            if (l.real() > 0) uk.push_back(l);
        for (auto& l : eigenvalues(t.reduced.A))
            if (l.real() > 0) ur.push_back(l);
        EXPECT_LE(oracle::spectrum_distance(uk, ur), 1e-10);
        EXPECT_TRUE(is_hurwitz(minimal_realization(t.delta).A));
    }
}

TEST(BalancedUnstable, InfeasibleOrder) {
    StateSpace K = fixtures::unstable_controller();  // two antistable modes
    try {
        balanced_truncate_unstable(K, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfeasibleOrder);
    }
}

TEST(ModalTruncate, ZeroResidueBlockIsFree) {
    Matrix A = Eigen::Vector3d(-1, -2, -3).asDiagonal();
    Matrix B = Matrix::Ones(3, 1), C(1, 3);
    C << 1, 0, 1;
    StateSpace K = make_system(A, B, C, m1(0));
    TruncationResult t = modal_truncate(K, 1);
    EXPECT_EQ(t.reduced.order(), 2);
    EXPECT_LE(oracle::grid_mismatch(t.reduced, K), 1e-12);
}

TEST(ModalTruncate, ExampleStablePart) {
    TruncationResult t = modal_truncate_stable(fixtures::table1_controller(), 1);
    EXPECT_NEAR(hinf_norm(t.delta), 0.0580, 0.05 * 0.0580);
    EXPECT_EQ(t.reduced.order(), 2);
    EXPECT_NEAR(lqg_cost(fixtures::table1_plant(), t.reduced), 8.9928, 0.01 * 8.9928);
}

TEST(ModalTruncate, RemovesUnstableMode) {
    TruncationResult t = modal_truncate(fixtures::unstable_controller(), 1);
    EXPECT_LE(oracle::grid_mismatch(t.reduced, fixtures::unstable_reduced()), 1e-12);
    EXPECT_LE(oracle::abs_mismatch(add(t.reduced, negate(t.delta)), fixtures::unstable_controller()), 1e-12);
}

TEST(ModalTruncate, DeltaConsistency) {
    for (std::uint64_t seed : {110u, 111u}) {
        Rng rng(seed);
        StateSpace K = add(random_stable_oscillatory(4, 1, 1, rng), random_modal_system(1, 1, 1, rng, 0.1, 1.5));
        TruncationResult t = modal_truncate(K, 2);
        EXPECT_LE(oracle::grid_mismatch(subtract(t.reduced, t.delta), K), 1e-8);
    }
}

TEST(ModalTruncate, ZeroModeCannotBeRemoved) {
    Matrix A = Eigen::Vector2d(0, -1).asDiagonal();
    StateSpace K = make_system(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2), m1(0));
    try {
        modal_truncate(K, 1);  // the origin mode is unrankable; the other is removed
    } catch (const Error&) {
        FAIL();
    }
    // origin, an axis pair and one ranked mode: removing two blocks needs an unranked one
    Matrix A3 = Matrix::Zero(4, 4);
    A3(1, 2) = 1;
    A3(2, 1) = -1;
    A3(3, 3) = -1;
    StateSpace K3 = make_system(A3, Matrix::Ones(4, 1), Matrix::Ones(1, 4), m1(0));
    try {
        modal_truncate(K3, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroMode);
    }
}
