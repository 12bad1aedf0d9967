#pragma once

#include "lti.hpp"

namespace ctred {

/// K = K_stable + K_unstable with D carried by the stable part.
struct StableUnstableSplit {
    StateSpace stable;
    StateSpace unstable;
};

namespace detail {

// Block-diagonalizing split at Re = -tol_stab. Axis eigenvalues either throw
// or are placed with the unstable part.
inline StableUnstableSplit split_core(const StateSpace& S, bool allow_axis) {
    Index n = S.order();
    double tol = tol_stab(S.A);
    auto ev = eigenvalues(S.A);
    Index ns = 0;
    for (auto& l : ev) {
        if (std::abs(l.real()) <= tol && !allow_axis)
            throw Error(ErrorKind::AxisPole, "eigenvalue on the imaginary axis: " + std::to_string(l.real()) + "+" +
                                                 std::to_string(l.imag()) + "i");
        if (l.real() < -tol) ++ns;
    }
    Index nm = S.inputs(), np = S.outputs();
    if (ns == n) return {S, zero_system(np, nm)};
    if (ns == 0) {
        StateSpace u = S;
        u.D = Matrix::Zero(np, nm);
        return {static_gain(S.D), u};
    }
    SchurForm sf = ordered_real_schur(S.A, [tol](cplx l) { return l.real() < -tol; });
    Index nu = n - ns;
    Matrix T11 = sf.T.topLeftCorner(ns, ns), T12 = sf.T.topRightCorner(ns, nu), T22 = sf.T.bottomRightCorner(nu, nu);
    Matrix X;
    try {
        // T11 X - X T22 + T12 = 0
        X = solve_sylvester(T11, -T22, T12);
    } catch (const Error& e) {
        throw Error(ErrorKind::IllConditionedSplit, e.what());
    }
    Matrix W = Matrix::Identity(n, n), Wi = Matrix::Identity(n, n);
    W.topRightCorner(ns, nu) = X;
    Wi.topRightCorner(ns, nu) = -X;
    Matrix Bt = Wi * sf.Z.transpose() * S.B;
    Matrix Ct = S.C * sf.Z * W;
    StateSpace st{T11, Bt.topRows(ns), Ct.leftCols(ns), S.D};
    StateSpace un{T22, Bt.bottomRows(nu), Ct.rightCols(nu), Matrix::Zero(np, nm)};
    return {st, un};
}

// Eigen square root factor L with W ~= L L^T (negative roundoff clipped).
inline Matrix psd_factor(const Matrix& W) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (W + W.transpose()));
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal();
}

// Square-root balanced truncation dropping Hankel values below 1e-9 sigma_1.
inline StateSpace minimal_stable(const StateSpace& S) {
    if (S.order() == 0) return S;
    Matrix Wc = solve_lyapunov(S.A, S.B * S.B.transpose());
    Matrix Wo = solve_lyapunov(S.A.transpose(), S.C.transpose() * S.C);
    Matrix Lc = psd_factor(Wc), Lo = psd_factor(Wo);
    Eigen::JacobiSVD<Matrix> svd(Lo.transpose() * Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index k = 0;
    if (s.size() > 0 && s(0) > 0)
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > 1e-9 * s(0)) ++k;
    if (k == 0) return StateSpace{Matrix(0, 0), Matrix(0, S.inputs()), Matrix(S.outputs(), 0), S.D};
    Vector si = s.head(k).cwiseSqrt().cwiseInverse();
    Matrix Tl = si.asDiagonal() * svd.matrixU().leftCols(k).transpose() * Lo.transpose();
    Matrix Tr = Lc * svd.matrixV().leftCols(k) * si.asDiagonal();
    return StateSpace{Tl * S.A * Tr, Tl * S.B, S.C * Tr, S.D};
}

// Orthogonal staircase reduction to the controllable then observable part.
inline StateSpace minimal_staircase(const StateSpace& S, double tol_b, double tol_c, double tol_a) {
    if (S.order() == 0) return S;
    Matrix V = reachable_basis(S.A, S.B, tol_b, tol_a);
    Matrix A = V.transpose() * S.A * V, B = V.transpose() * S.B, C = S.C * V;
    Matrix U = reachable_basis(A.transpose(), C.transpose(), tol_c, tol_a);
    return StateSpace{U.transpose() * A * U, U.transpose() * B, C * U, S.D};
}

}  // namespace detail

/// Minimal realization. Stable part by square-root balanced truncation,
/// remaining part by an orthogonal staircase with absolute thresholds taken
/// from the whole system.
inline StateSpace minimal_realization(const StateSpace& S) {
    if (S.order() == 0) return S;
    double na = std::max(S.A.norm(), 1e-300);
    double tb = 1e-9 * std::max(S.B.norm(), 1e-300), tc = 1e-9 * std::max(S.C.norm(), 1e-300);
    StableUnstableSplit parts;
    try {
        parts = detail::split_core(S, true);
    } catch (const Error&) {
        return detail::minimal_staircase(S, tb, tc, 1e-9 * na);
    }
    StateSpace st = detail::minimal_stable(parts.stable);
    StateSpace un = detail::minimal_staircase(parts.unstable, tb, tc, 1e-9 * na);
    return add(st, un);
}

/// Poles of the transfer function (eigenvalues of a minimal realization).
inline std::vector<cplx> poles(const StateSpace& S) { return eigenvalues(minimal_realization(S).A); }

/// True when the transfer function is stable, i.e. every pole of a minimal
/// realization lies strictly in the open left half-plane.
inline bool is_stable_transfer(const StateSpace& S) {
    if (is_hurwitz(S.A)) return true;
    StateSpace M = minimal_realization(S);
    return M.order() == 0 || M.A.rows() == 0 || spectral_abscissa(M.A) < -tol_stab(S.A);
}

/// Stable realization of the same transfer function, or nullopt when it has
/// poles outside the open left half-plane.
inline std::optional<StateSpace> stable_realization(const StateSpace& S) {
    if (is_hurwitz(S.A)) return S;
    StateSpace M = minimal_realization(S);
    if (M.order() == 0 || spectral_abscissa(M.A) < -tol_stab(S.A)) return M;
    return std::nullopt;
}

}  // namespace ctred
