#pragma once

#include <algorithm>
#include <numeric>

#include "decompose.hpp"

namespace ctred {

struct BalancedRealization {
    StateSpace system;
    std::vector<double> hsv;  // Hankel singular values, descending
    Matrix T;                 // balanced = (T A T^-1, T B, C T^-1, D)
    Matrix Tinv;
};

/// Balanced realization of a stable minimal system.
inline BalancedRealization balance(const StateSpace& S) {
    detail::require_hurwitz(S, "balance");
    Index n = S.order();
    require(n > 0, ErrorKind::Dimension, "balance: empty system");
    Matrix Wc = solve_lyapunov(S.A, S.B * S.B.transpose());
    Matrix Wo = solve_lyapunov(S.A.transpose(), S.C.transpose() * S.C);
    Eigen::SelfAdjointEigenSolver<Matrix> ec(Wc);
    Vector mu = ec.eigenvalues();
    if (!(mu(0) >= 1e-12 * mu(n - 1)))
        throw Error(ErrorKind::NotMinimal, "controllability Gramian is numerically singular");
    Vector sq = mu.cwiseSqrt();
    Matrix Q = ec.eigenvectors() * sq.asDiagonal();
    Matrix Qi = sq.cwiseInverse().asDiagonal() * ec.eigenvectors().transpose();
    Matrix M = Q.transpose() * Wo * Q;
    Eigen::SelfAdjointEigenSolver<Matrix> em(0.5 * (M + M.transpose()));
    Vector s2 = em.eigenvalues().reverse();
    Matrix U = em.eigenvectors().rowwise().reverse();
    std::vector<double> hsv(n);
    for (Index i = 0; i < n; ++i) hsv[i] = std::sqrt(std::max(0.0, s2(i)));
    if (!(hsv[n - 1] >= 1e-10 * hsv[0])) throw Error(ErrorKind::NotMinimal, "Hankel singular values reveal a non-minimal system");
    Vector sh(n);
    for (Index i = 0; i < n; ++i) sh(i) = std::sqrt(hsv[i]);
    Matrix T = sh.asDiagonal() * U.transpose() * Qi;
    Matrix Ti = Q * U * sh.cwiseInverse().asDiagonal();
    return {similarity(S, T, Ti), hsv, T, Ti};
}

enum class Method { Balanced, Modal };

inline const char* to_string(Method m) { return m == Method::Balanced ? "balanced" : "modal"; }

struct TruncationResult {
    StateSpace reduced;
    StateSpace delta;  // K_r - K, realized without the shared modes
    Method method = Method::Balanced;
    std::vector<double> hsv;           // balanced: Hankel values of the truncated stable part
    std::vector<double> removed_tail;  // balanced: discarded Hankel values
    double tail_sum() const { return std::accumulate(removed_tail.begin(), removed_tail.end(), 0.0); }
};

/// Balanced truncation of a stable minimal system to order r.
inline TruncationResult balanced_truncate(const StateSpace& S, Index r) {
    Index n = S.order();
    require(r >= 1 && r < n, ErrorKind::OutOfRange,
            "order " + std::to_string(r) + " outside [1, " + std::to_string(n - 1) + "]");
    BalancedRealization b = balance(S);
    if (b.hsv[r - 1] - b.hsv[r] < 1e-9 * b.hsv[0])
        throw Error(ErrorKind::PartitionTie, "Hankel values tie at the truncation point");
    const StateSpace& bs = b.system;
    TruncationResult out;
    out.method = Method::Balanced;
    out.reduced = StateSpace{bs.A.topLeftCorner(r, r), bs.B.topRows(r), bs.C.leftCols(r), bs.D};
    out.delta = subtract(out.reduced, bs);
    out.hsv = b.hsv;
    out.removed_tail.assign(b.hsv.begin() + r, b.hsv.end());
    return out;
}

/// Balanced truncation of the stable part only; the unstable part is kept.
/// r is the order of the result and must be at least the unstable order.
inline TruncationResult balanced_truncate_unstable(const StateSpace& K, Index r) {
    Index n = K.order();
    require(r < n, ErrorKind::OutOfRange, "order must be below " + std::to_string(n));
    StableUnstableSplit sp = split_stable_unstable(K);
    Index n2 = sp.unstable.order(), n1 = sp.stable.order();
    require(n1 >= 1, ErrorKind::InfeasibleOrder, "controller has no stable part to reduce");
    require(r >= n2, ErrorKind::InfeasibleOrder,
            "order " + std::to_string(r) + " is below the unstable order " + std::to_string(n2));
    Index nr = r - n2;
    TruncationResult out;
    out.method = Method::Balanced;
    StateSpace kr;
    if (nr >= 1) {
        TruncationResult bt = balanced_truncate(sp.stable, nr);
        kr = bt.reduced;
        out.hsv = bt.hsv;
        out.removed_tail = bt.removed_tail;
        out.delta = bt.delta;
    } else {
        BalancedRealization b = balance(sp.stable);
        kr = static_gain(sp.stable.D);
        out.hsv = b.hsv;
        out.removed_tail = b.hsv;
        out.delta = negate(b.system);
        out.delta.D.setZero();
    }
    out.reduced = add(kr, sp.unstable);
    return out;
}

namespace detail {

inline TruncationResult modal_drop(const ModalDecomposition& md, Index r_red) {
    Index k = static_cast<Index>(md.blocks.size());
    require(r_red >= 1 && r_red < k, ErrorKind::OutOfRange,
            "number of removed blocks must lie in [1, " + std::to_string(k - 1) + "]");
    std::vector<std::size_t> idx(md.blocks.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](std::size_t i) {
        const ModalBlock& b = md.blocks[i];
        double d = b.importance ? *b.importance : std::numeric_limits<double>::infinity();
        return std::make_tuple(d, std::abs(b.lambda.real()), std::abs(b.lambda.imag()), i);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<bool> drop(md.blocks.size(), false);
    for (Index j = 0; j < r_red; ++j) {
        if (!md.blocks[idx[j]].importance)
            throw Error(ErrorKind::ZeroMode, "removal would discard a zero or imaginary-axis mode");
        drop[idx[j]] = true;
    }
    std::vector<std::size_t> keep, gone;
    for (std::size_t i = 0; i < md.blocks.size(); ++i) (drop[i] ? gone : keep).push_back(i);
    TruncationResult out;
    out.method = Method::Modal;
    out.reduced = md.assemble(keep);
    ModalDecomposition zero{md.blocks, Matrix::Zero(md.D.rows(), md.D.cols())};
    out.delta = negate(zero.assemble(gone));
    return out;
}

}  // namespace detail

/// Modal truncation removing the r_red least important modal blocks.
inline TruncationResult modal_truncate(const StateSpace& K, Index r_red) {
    return detail::modal_drop(modal_form(K), r_red);
}

/// Modal truncation restricted to the stable part; the unstable part is kept.
inline TruncationResult modal_truncate_stable(const StateSpace& K, Index r_red) {
    StableUnstableSplit sp = split_stable_unstable(K);
    require(sp.stable.order() >= 1, ErrorKind::InfeasibleOrder, "controller has no stable part to reduce");
    TruncationResult t = detail::modal_drop(modal_form(sp.stable), r_red);
    t.reduced = add(t.reduced, sp.unstable);
    return t;
}

}  // namespace ctred
