#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace ctred {

inline std::vector<cplx> eigenvalues(const Matrix& A) {
    require(A.rows() == A.cols(), ErrorKind::Dimension, "eigenvalues: matrix not square");
    require_finite(A, "A");
    std::vector<cplx> out;
    if (A.rows() == 0) return out;
    Eigen::EigenSolver<Matrix> es(A, false);
    require(es.info() == Eigen::Success, ErrorKind::Convergence, "eigenvalue iteration failed");
    for (Index i = 0; i < A.rows(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

inline double spectral_abscissa(const Matrix& A) {
    double m = -std::numeric_limits<double>::infinity();
    for (auto& l : eigenvalues(A)) m = std::max(m, l.real());
    return m;
}

inline bool is_hurwitz(const Matrix& A) { return A.rows() == 0 || spectral_abscissa(A) < -tol_stab(A); }

/// Quasi-upper-triangular T with A = Z T Z^T. `blocks` holds the diagonal block sizes (1 or 2).
struct SchurForm {
    Matrix T;
    Matrix Z;
    std::vector<int> blocks;

    std::vector<Index> starts() const {
        std::vector<Index> s;
        Index k = 0;
        for (int b : blocks) {
            s.push_back(k);
            k += b;
        }
        return s;
    }
    /// Eigenvalue of block i; for a 2x2 block the one with positive imaginary part.
    cplx block_eigenvalue(std::size_t i) const {
        Index s = starts()[i];
        if (blocks[i] == 1) return T(s, s);
        double a = T(s, s), b = T(s, s + 1), c = T(s + 1, s), d = T(s + 1, s + 1);
        double tr = 0.5 * (a + d);
        double disc = 0.25 * (a - d) * (a - d) + b * c;
        if (disc >= 0) return tr + std::sqrt(disc);
        return {tr, std::sqrt(-disc)};
    }
};

namespace detail {

inline std::vector<int> detect_blocks(const Matrix& T) {
    std::vector<int> b;
    Index n = T.rows();
    for (Index i = 0; i < n;) {
        if (i + 1 < n && T(i + 1, i) != 0.0) {
            b.push_back(2);
            i += 2;
        } else {
            b.push_back(1);
            i += 1;
        }
    }
    return b;
}

// Solve A11 X - X A22 = A12 for tiny blocks through the Kronecker form.
inline Matrix small_sylvester(const Matrix& A11, const Matrix& A22, const Matrix& A12, double floor) {
    Index p = A11.rows(), q = A22.rows();
    Matrix K = Matrix::Zero(p * q, p * q);
    for (Index j = 0; j < q; ++j)
        for (Index i = 0; i < q; ++i) {
            if (i == j) K.block(j * p, i * p, p, p) += A11;
            K.block(j * p, i * p, p, p) -= A22(i, j) * Matrix::Identity(p, p);
        }
    Eigen::FullPivLU<Matrix> lu(K);
    Vector rhs = Eigen::Map<const Vector>(A12.data(), p * q);
    double smin = Eigen::JacobiSVD<Matrix>(K).singularValues().tail(1)(0);
    if (!(smin > floor)) throw Error(ErrorKind::IllConditionedReordering, "adjacent blocks have nearly equal eigenvalues");
    Vector x = lu.solve(rhs);
    return Eigen::Map<Matrix>(x.data(), p, q);
}

// Swap the adjacent diagonal blocks starting at block index k.
inline void swap_blocks(SchurForm& S, std::size_t k) {
    auto st = S.starts();
    Index j = st[k];
    int p = S.blocks[k], q = S.blocks[k + 1];
    int m = p + q;
    Matrix& T = S.T;
    double scale = std::max(1.0, T.norm());
    Matrix A11 = T.block(j, j, p, p), A12 = T.block(j, j + p, p, q), A22 = T.block(j + p, j + p, q, q);
    Matrix X = small_sylvester(A11, A22, A12, 1e-13 * scale);
    Matrix M(m, q);
    M << -X, Matrix::Identity(q, q);
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(m, m);
    T.middleRows(j, m) = (Q.transpose() * T.middleRows(j, m)).eval();
    T.middleCols(j, m) = (T.middleCols(j, m) * Q).eval();
    S.Z.middleCols(j, m) = (S.Z.middleCols(j, m) * Q).eval();
    double resid = T.block(j + q, j, p, q).norm();
    if (resid > 1e-10 * scale)
        throw Error(ErrorKind::IllConditionedReordering, "block swap residual " + std::to_string(resid));
    T.block(j + q, j, p, q).setZero();
    std::swap(S.blocks[k], S.blocks[k + 1]);
}

inline void clean_lower(SchurForm& S) {
    Index n = S.T.rows();
    auto st = S.starts();
    for (Index c = 0; c < n; ++c)
        for (Index r = c + 1; r < n; ++r) {
            bool inside = false;
            for (std::size_t b = 0; b < st.size(); ++b)
                if (S.blocks[b] == 2 && r == st[b] + 1 && c == st[b]) inside = true;
            if (!inside) S.T(r, c) = 0.0;
        }
}

}  // namespace detail

inline SchurForm real_schur(const Matrix& A) {
    require(A.rows() == A.cols(), ErrorKind::Dimension, "real_schur: matrix not square");
    require_finite(A, "A");
    SchurForm S;
    Index n = A.rows();
    if (n == 0) {
        S.T = Matrix(0, 0);
        S.Z = Matrix(0, 0);
        return S;
    }
    Eigen::RealSchur<Matrix> rs(A);
    require(rs.info() == Eigen::Success, ErrorKind::Convergence, "real Schur iteration failed");
    S.T = rs.matrixT();
    S.Z = rs.matrixU();
    for (Index c = 0; c < n; ++c)
        for (Index r = c + 2; r < n; ++r) S.T(r, c) = 0.0;
    S.blocks = detail::detect_blocks(S.T);
    return S;
}

/// Stable bubble sort of the diagonal blocks. `before(a, b)` true means block
/// eigenvalue a must precede b; blocks that compare equal are never swapped.
inline void reorder_schur(SchurForm& S, const std::function<bool(cplx, cplx)>& before) {
    std::size_t nb = S.blocks.size();
    for (std::size_t pass = 0; pass < nb; ++pass) {
        bool swapped = false;
        for (std::size_t k = 0; k + 1 < S.blocks.size(); ++k) {
            if (before(S.block_eigenvalue(k + 1), S.block_eigenvalue(k))) {
                detail::swap_blocks(S, k);
                swapped = true;
            }
        }
        if (!swapped) break;
    }
    detail::clean_lower(S);
}

/// Real Schur form with the selected eigenvalues leading.
inline SchurForm ordered_real_schur(const Matrix& A, const std::function<bool(cplx)>& select) {
    SchurForm S = real_schur(A);
    reorder_schur(S, [&](cplx a, cplx b) { return select(a) && !select(b); });
    return S;
}

namespace detail {

// Solve R Y + Y S = F with R, S quasi-upper-triangular.
inline Matrix quasi_triangular_sylvester(const SchurForm& R, const SchurForm& S, const Matrix& F) {
    Index m = R.T.rows(), n = S.T.rows();
    Matrix Y = Matrix::Zero(m, n);
    auto rs = R.starts();
    auto ss = S.starts();
    for (std::size_t jb = 0; jb < ss.size(); ++jb) {
        Index j = ss[jb];
        int q = S.blocks[jb];
        Matrix G = F.middleCols(j, q);
        if (j > 0) G -= Y.leftCols(j) * S.T.block(0, j, j, q);
        for (std::size_t ibr = rs.size(); ibr-- > 0;) {
            Index i = rs[ibr];
            int p = R.blocks[ibr];
            Matrix H = G.middleRows(i, p);
            Index tail = m - i - p;
            if (tail > 0) H -= R.T.block(i, i + p, p, tail) * Y.block(i + p, j, tail, q);
            Matrix K = Matrix::Zero(p * q, p * q);
            for (Index c = 0; c < q; ++c)
                for (Index k = 0; k < q; ++k) {
                    if (c == k) K.block(c * p, c * p, p, p) += R.T.block(i, i, p, p);
                    K.block(c * p, k * p, p, p) += S.T(j + k, j + c) * Matrix::Identity(p, p);
                }
            Vector rhs = Eigen::Map<const Vector>(H.data(), p * q);
            Vector y = K.fullPivLu().solve(rhs);
            Y.block(i, j, p, q) = Eigen::Map<Matrix>(y.data(), p, q);
        }
    }
    return Y;
}

}  // namespace detail

/// Solve A X + X B + C = 0 (Bartels-Stewart).
inline Matrix solve_sylvester(const Matrix& A, const Matrix& B, const Matrix& C) {
    require(A.rows() == A.cols() && B.rows() == B.cols(), ErrorKind::Dimension, "sylvester: A, B must be square");
    require(C.rows() == A.rows() && C.cols() == B.rows(), ErrorKind::Dimension, "sylvester: C shape mismatch");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(C, "C");
    if (C.size() == 0) return Matrix::Zero(C.rows(), C.cols());
    double scale = std::max({inf_norm(A), inf_norm(B), 1e-300});
    double tsep = tolerances().sep * scale;
    auto la = eigenvalues(A);
    auto lb = eigenvalues(B);
    double sep = std::numeric_limits<double>::infinity();
    for (auto& a : la)
        for (auto& b : lb) sep = std::min(sep, std::abs(a + b));
    if (!(sep > tsep))
        throw Error(ErrorKind::NearSingularSeparation, "min |la + lb| = " + std::to_string(sep));
    SchurForm R = real_schur(A);
    SchurForm S = real_schur(B);
    Matrix F = -(R.Z.transpose() * C * S.Z);
    Matrix Y = detail::quasi_triangular_sylvester(R, S, F);
    Matrix X = R.Z * Y * S.Z.transpose();
    double res = (A * X + X * B + C).norm();
    // relative residual bound, widened by the backward-error floor when X is large
    double lim = 1e-9 * std::max(1.0, C.norm()) + 1e-12 * scale * X.norm();
    if (!(res <= lim)) throw Error(ErrorKind::Convergence, "sylvester residual " + std::to_string(res));
    return X;
}

/// Solve A X + X A^T + Q = 0 for Hurwitz A.
inline Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
    require(A.rows() == A.cols() && Q.rows() == A.rows() && Q.cols() == A.rows(), ErrorKind::Dimension,
            "lyapunov: shape mismatch");
    require_finite(A, "A");
    require_finite(Q, "Q");
    if (A.rows() == 0) return Matrix(0, 0);
    if (!is_hurwitz(A))
        throw Error(ErrorKind::StabilityPrecondition, "lyapunov: A not Hurwitz (abscissa " +
                                                          std::to_string(spectral_abscissa(A)) + ")");
    Matrix X = solve_sylvester(A, A.transpose(), Q);
    return 0.5 * (X + X.transpose());
}

/// Stabilizing solution of A^T P + P A - P B R^{-1} B^T P + Q = 0.
inline Matrix solve_care(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R) {
    Index n = A.rows(), m = B.cols();
    require(A.cols() == n && B.rows() == n && Q.rows() == n && Q.cols() == n && R.rows() == m && R.cols() == m,
            ErrorKind::Dimension, "care: shape mismatch");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(Q, "Q");
    require_finite(R, "R");
    if (n == 0) return Matrix(0, 0);
    Eigen::LLT<Matrix> llt(0.5 * (R + R.transpose()));
    require(llt.info() == Eigen::Success, ErrorKind::Dimension, "care: R not positive definite");
    Matrix G = B * llt.solve(B.transpose());
    Matrix H(2 * n, 2 * n);
    H << A, -G, -Q, -A.transpose();
    double tol = 1e-9 * std::max(1.0, inf_norm(H));
    for (auto& l : eigenvalues(H))
        if (std::abs(l.real()) <= tol)
            throw Error(ErrorKind::NoStabilizingSolution, "Hamiltonian has imaginary-axis eigenvalues");
    SchurForm S = ordered_real_schur(H, [](cplx l) { return l.real() < 0; });
    Matrix U11 = S.Z.topLeftCorner(n, n), U21 = S.Z.bottomLeftCorner(n, n);
    Eigen::FullPivLU<Matrix> lu(U11.transpose());
    require(lu.isInvertible(), ErrorKind::NoStabilizingSolution, "care: singular U11");
    Matrix P = lu.solve(U21.transpose()).transpose();
    P = 0.5 * (P + P.transpose());
    Matrix res = A.transpose() * P + P * A - P * G * P + Q;
    double lim = 1e-8 * std::max(1.0, Q.norm()) * std::max(1.0, P.norm() * (1.0 + A.norm() + G.norm() * P.norm()));
    require(res.norm() <= lim, ErrorKind::Convergence, "care residual " + std::to_string(res.norm()));
    require(is_hurwitz(A - G * P), ErrorKind::NoStabilizingSolution, "care: closed loop not stable");
    return P;
}

}  // namespace ctred
