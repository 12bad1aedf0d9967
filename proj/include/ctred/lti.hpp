#pragma once

#include <string>
#include <vector>

#include "polynomial.hpp"

namespace ctred {

/// Continuous-time state-space realization x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
    Matrix A, B, C, D;

    Index order() const { return A.rows(); }
    Index inputs() const { return D.cols(); }
    Index outputs() const { return D.rows(); }
    bool siso() const { return inputs() == 1 && outputs() == 1; }
};

inline StateSpace make_system(Matrix A, Matrix B, Matrix C, Matrix D) {
    Index n = A.rows();
    require(A.cols() == n, ErrorKind::Dimension, "A must be square");
    require(B.rows() == n, ErrorKind::Dimension, "B must have as many rows as A");
    require(C.cols() == n, ErrorKind::Dimension, "C must have as many columns as A");
    require(D.rows() == C.rows() && D.cols() == B.cols(), ErrorKind::Dimension, "D must be outputs x inputs");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(C, "C");
    require_finite(D, "D");
    return StateSpace{std::move(A), std::move(B), std::move(C), std::move(D)};
}

/// Order-zero system with constant gain D.
inline StateSpace static_gain(const Matrix& D) {
    return make_system(Matrix(0, 0), Matrix(0, D.cols()), Matrix(D.rows(), 0), D);
}

inline StateSpace zero_system(Index p, Index m) { return static_gain(Matrix::Zero(p, m)); }

inline CMatrix evaluate(const StateSpace& S, cplx s) {
    CMatrix D = S.D.cast<cplx>();
    if (S.order() == 0) return D;
    CMatrix M = s * CMatrix::Identity(S.order(), S.order()) - S.A.cast<cplx>();
    return S.C.cast<cplx>() * M.partialPivLu().solve(S.B.cast<cplx>()) + D;
}

inline double sigma_max(const StateSpace& S, double w) {
    CMatrix G = evaluate(S, cplx(0.0, w));
    if (G.size() == 0) return 0.0;
    return Eigen::JacobiSVD<CMatrix>(G).singularValues()(0);
}

inline StateSpace negate(const StateSpace& S) { return StateSpace{S.A, S.B, -S.C, -S.D}; }

/// Parallel connection S1 + S2.
inline StateSpace add(const StateSpace& S1, const StateSpace& S2) {
    require(S1.inputs() == S2.inputs() && S1.outputs() == S2.outputs(), ErrorKind::Dimension, "add: I/O mismatch");
    Index n1 = S1.order(), n2 = S2.order();
    Matrix A = Matrix::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = S1.A;
    A.bottomRightCorner(n2, n2) = S2.A;
    Matrix B(n1 + n2, S1.inputs());
    B << S1.B, S2.B;
    Matrix C(S1.outputs(), n1 + n2);
    C << S1.C, S2.C;
    return StateSpace{A, B, C, S1.D + S2.D};
}

inline StateSpace subtract(const StateSpace& S1, const StateSpace& S2) { return add(S1, negate(S2)); }

/// Series product S1 * S2 (S2 acts first).
inline StateSpace series(const StateSpace& S1, const StateSpace& S2) {
    require(S1.inputs() == S2.outputs(), ErrorKind::Dimension, "series: inner dimension mismatch");
    Index n1 = S1.order(), n2 = S2.order();
    Matrix A = Matrix::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = S1.A;
    A.topRightCorner(n1, n2) = S1.B * S2.C;
    A.bottomRightCorner(n2, n2) = S2.A;
    Matrix B(n1 + n2, S2.inputs());
    B << S1.B * S2.D, S2.B;
    Matrix C(S1.outputs(), n1 + n2);
    C << S1.C, S1.D * S2.C;
    return StateSpace{A, B, C, S1.D * S2.D};
}

/// Inverse system; requires square invertible D.
inline StateSpace invert(const StateSpace& S) {
    require(S.inputs() == S.outputs(), ErrorKind::Dimension, "invert: system not square");
    Eigen::FullPivLU<Matrix> lu(S.D);
    require(lu.isInvertible(), ErrorKind::Dimension, "invert: D not invertible");
    Matrix Di = lu.inverse();
    return StateSpace{S.A - S.B * Di * S.C, S.B * Di, -Di * S.C, Di};
}

/// Identity plus S (square systems).
inline StateSpace identity_plus(const StateSpace& S) {
    StateSpace R = S;
    R.D += Matrix::Identity(S.outputs(), S.inputs());
    return R;
}

inline StateSpace similarity(const StateSpace& S, const Matrix& T, const Matrix& Tinv) {
    return StateSpace{T * S.A * Tinv, T * S.B, S.C * Tinv, S.D};
}

inline StateSpace transpose(const StateSpace& S) {
    return StateSpace{S.A.transpose(), S.C.transpose(), S.B.transpose(), S.D.transpose()};
}

namespace detail {
inline void require_loop(const StateSpace& G, const StateSpace& K) {
    require(K.inputs() == G.outputs() && K.outputs() == G.inputs(), ErrorKind::Dimension,
            "controller I/O does not match plant");
    require(G.D.isZero(0.0), ErrorKind::Dimension, "plant must be strictly proper");
    require(K.D.isZero(0.0), ErrorKind::Dimension, "controller must be strictly proper");
}
}  // namespace detail

/// Positive-feedback closed-loop state matrix [[A, B C_K], [B_K C, A_K]].
inline Matrix closed_loop_matrix(const StateSpace& G, const StateSpace& K) {
    detail::require_loop(G, K);
    Index n = G.order(), nk = K.order();
    Matrix Acl(n + nk, n + nk);
    Acl << G.A, G.B * K.C, K.B * G.C, K.A;
    return Acl;
}

struct StabilityReport {
    bool stable = false;
    double abscissa = 0.0;
    std::vector<cplx> poles;
};

inline StabilityReport is_internally_stable(const StateSpace& G, const StateSpace& K) {
    Matrix Acl = closed_loop_matrix(G, K);
    StabilityReport r;
    r.poles = eigenvalues(Acl);
    r.abscissa = -std::numeric_limits<double>::infinity();
    for (auto& l : r.poles) r.abscissa = std::max(r.abscissa, l.real());
    r.stable = Acl.rows() == 0 || r.abscissa < -tol_stab(Acl);
    return r;
}

/// Closed-loop map [w; v] -> [y~; u]: blocks X, XK on top, KX, KY below.
struct FourBlock {
    StateSpace T;
    Index m = 0;  // plant inputs
    Index p = 0;  // plant outputs

    StateSpace block(bool top, bool left) const {
        Index r0 = top ? 0 : p, rn = top ? p : m;
        Index c0 = left ? 0 : m, cn = left ? m : p;
        return StateSpace{T.A, T.B.middleCols(c0, cn), T.C.middleRows(r0, rn), Matrix::Zero(rn, cn)};
    }
    StateSpace X() const { return block(true, true); }
    StateSpace XK() const { return block(true, false); }
    StateSpace KX() const { return block(false, true); }
    StateSpace KY() const { return block(false, false); }
};

inline FourBlock four_block(const StateSpace& G, const StateSpace& K) {
    Matrix Acl = closed_loop_matrix(G, K);
    Index n = G.order(), nk = K.order(), m = G.inputs(), p = G.outputs();
    Matrix B = Matrix::Zero(n + nk, m + p);
    B.topLeftCorner(n, m) = G.B;
    B.bottomRightCorner(nk, p) = K.B;
    Matrix C = Matrix::Zero(p + m, n + nk);
    C.topLeftCorner(p, n) = G.C;
    C.bottomRightCorner(m, nk) = K.C;
    return FourBlock{StateSpace{Acl, B, C, Matrix::Zero(p + m, m + p)}, m, p};
}

/// Y = (I - GK)^{-1} and X = (I - GK)^{-1} G for a stabilizing K.
struct SensitivityPair {
    StateSpace Y;
    StateSpace X;
};

inline SensitivityPair sensitivity_pair(const StateSpace& G, const StateSpace& K) {
    auto st = is_internally_stable(G, K);
    require(st.stable, ErrorKind::NotStabilizing,
            "controller does not stabilize the plant (abscissa " + std::to_string(st.abscissa) + ")");
    FourBlock F = four_block(G, K);
    StateSpace X = F.X();
    StateSpace Y = F.XK();
    Y.D = Matrix::Identity(F.p, F.p);
    return {Y, X};
}

namespace detail {

// Orthonormal basis of the reachable subspace of (A, B) via a block Arnoldi staircase.
// The first block is ranked against tol_b, later blocks against tol_a.
inline Matrix reachable_basis(const Matrix& A, const Matrix& B, double tol_b, double tol_a) {
    Index n = A.rows();
    Matrix V(n, 0);
    auto extend = [&](const Matrix& W, double tol) {
        Matrix R = W - V * (V.transpose() * W);
        R -= V * (V.transpose() * R);
        if (R.cols() == 0 || n == 0) return Matrix(n, 0);
        Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeThinU);
        Index k = 0;
        for (Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > tol) ++k;
        k = std::min<Index>(k, n - V.cols());
        Matrix U = svd.matrixU().leftCols(k);
        return U;
    };
    Matrix blk = extend(B, tol_b);
    while (blk.cols() > 0) {
        Matrix Vn(n, V.cols() + blk.cols());
        Vn << V, blk;
        V = Vn;
        if (V.cols() >= n) break;
        blk = extend(A * blk, tol_a);
    }
    return V;
}

}  // namespace detail

struct MinimalityReport {
    bool minimal = false;
    Index controllable_rank = 0;
    Index observable_rank = 0;
};

/// Numerical minimality via orthogonalized Krylov sequences; singular values
/// below 1e-9 of the relevant scale count as zero.
inline MinimalityReport check_minimal(const StateSpace& S) {
    MinimalityReport r;
    Index n = S.order();
    if (n == 0) {
        r.minimal = true;
        return r;
    }
    double na = S.A.norm();
    double nb = S.B.norm(), nc = S.C.norm();
    r.controllable_rank = detail::reachable_basis(S.A, S.B, 1e-9 * nb, 1e-9 * std::max(na, 1e-300)).cols();
    r.observable_rank =
        detail::reachable_basis(S.A.transpose(), S.C.transpose(), 1e-9 * nc, 1e-9 * std::max(na, 1e-300)).cols();
    r.minimal = r.controllable_rank == n && r.observable_rank == n;
    return r;
}

/// SISO transfer function num/den with monic den.
struct Rational {
    RPoly num;
    RPoly den;

    cplx operator()(cplx s) const { return num(s) / den(s); }
};

inline double tol_pz(cplx root) { return 1e-7 * (1.0 + std::abs(root)); }

/// Rational form of a SISO system; common pole/zero pairs within tol_pz are cancelled.
inline Rational to_rational(const StateSpace& S) {
    require(S.siso(), ErrorKind::Unsupported, "to_rational: SISO only");
    Index n = S.order();
    auto pa = eigenvalues(S.A);
    RPoly den = real_poly_from_roots(pa);
    if (n == 0) return Rational{RPoly::constant(S.D(0, 0)), RPoly::constant(1.0)};
    RPoly cl = real_poly_from_roots(eigenvalues(S.A - S.B * S.C));
    RPoly num = cl - den;
    double scale = 0;
    for (double c : den.c) scale = std::max(scale, std::abs(c));
    for (double c : cl.c) scale = std::max(scale, std::abs(c));
    for (auto& c : num.c)
        if (std::abs(c) <= 1e-12 * scale) c = 0.0;
    num.trim();
    num = num + S.D(0, 0) * den;
    if (num.degree() < 0) return Rational{RPoly(), RPoly::constant(1.0)};
    auto za = roots(num);
    std::vector<bool> used(pa.size(), false);
    std::vector<cplx> zk, pk;
    for (auto& z : za) {
        std::size_t best = pa.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (!used[i] && std::abs(z - pa[i]) < bd) {
                bd = std::abs(z - pa[i]);
                best = i;
            }
        if (best < pa.size() && bd <= tol_pz(pa[best]))
            used[best] = true;
        else
            zk.push_back(z);
    }
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (!used[i]) pk.push_back(pa[i]);
    return Rational{num.lead() * real_poly_from_roots(zk), real_poly_from_roots(pk)};
}

/// Finite zeros of a SISO system.
inline std::vector<cplx> zeros(const StateSpace& S) { return roots(to_rational(S).num); }

}  // namespace ctred
