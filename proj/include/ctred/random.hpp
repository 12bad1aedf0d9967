#pragma once

#include <cstdint>
#include <random>

#include "decompose.hpp"

namespace ctred {

/// Seeded generator with a platform-independent uniform mapping.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    Matrix matrix(Index r, Index c, double a = -1, double b = 1) {
        Matrix M(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) M(i, j) = uniform(a, b);
        return M;
    }

private:
    std::mt19937_64 eng_;
};

inline Matrix random_orthogonal(Index n, Rng& rng) {
    Matrix M = rng.matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i)
        if (R(i, i) < 0) Q.col(i) *= -1;
    return Q;
}

/// Orthogonally similar to diag(lambda) with lambda uniform in [lo, hi];
/// B, C uniform in [-1, 1]. Resampled until numerically minimal.
inline StateSpace random_modal_system(Index n, Index m, Index p, Rng& rng, double lo, double hi) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vector d(n);
        for (Index i = 0; i < n; ++i) d(i) = rng.uniform(lo, hi);
        Matrix Q = random_orthogonal(n, rng);
        StateSpace S{Q * d.asDiagonal() * Q.transpose(), rng.matrix(n, m), rng.matrix(p, n), Matrix::Zero(p, m)};
        if (check_minimal(S).minimal) return S;
    }
    throw Error(ErrorKind::Convergence, "could not draw a minimal system");
}

inline StateSpace random_stable_minimal(Index n, Index m, Index p, Rng& rng) {
    return random_modal_system(n, m, p, rng, -5.0, -0.2);
}

/// Stable minimal system with complex pole pairs mixed in.
inline StateSpace random_stable_oscillatory(Index n, Index m, Index p, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix A = Matrix::Zero(n, n);
        Index i = 0;
        while (i < n) {
            double re = rng.uniform(-5.0, -0.2);
            if (i + 1 < n && rng.uniform() < 0.5) {
                double im = rng.uniform(0.2, 5.0);
                A(i, i) = re;
                A(i + 1, i + 1) = re;
                A(i, i + 1) = im;
                A(i + 1, i) = -im;
                i += 2;
            } else {
                A(i, i) = re;
                i += 1;
            }
        }
        Matrix Q = random_orthogonal(n, rng);
        StateSpace S{Q * A * Q.transpose(), rng.matrix(n, m), rng.matrix(p, n), Matrix::Zero(p, m)};
        if (check_minimal(S).minimal) return S;
    }
    throw Error(ErrorKind::Convergence, "could not draw a minimal system");
}

/// Observer-based controller for `K` viewed as a plant, using identity-weight
/// Riccati designs. In the positive-feedback loop it stabilizes K.
inline StateSpace observer_based_partner(const StateSpace& K) {
    Index n = K.order(), m = K.inputs(), p = K.outputs();
    Matrix P = solve_care(K.A, K.B, Matrix::Identity(n, n), Matrix::Identity(m, m));
    Matrix F = K.B.transpose() * P;
    Matrix P2 = solve_care(K.A.transpose(), K.C.transpose(), Matrix::Identity(n, n), Matrix::Identity(p, p));
    Matrix L = P2 * K.C.transpose();
    return StateSpace{K.A - K.B * F - L * K.C, L, -F, Matrix::Zero(m, p)};
}

struct Instance {
    StateSpace G;
    StateSpace K;
};

/// Random controller with `n_unstable` antistable modes and a plant that it
/// stabilizes (plant and controller roles swapped in the synthesis).
inline Instance generate_instance(Index order, Index n_unstable, std::uint64_t seed, Index m = 1, Index p = 1) {
    require(order >= 1 && n_unstable >= 0 && n_unstable < order, ErrorKind::OutOfRange,
            "need order >= 1 and 0 <= unstable < order");
    Rng rng(seed);
    for (int attempt = 0; attempt < 20; ++attempt) {
        try {
            StateSpace Ks = random_stable_minimal(order - n_unstable, p, m, rng);
            StateSpace K = Ks;
            if (n_unstable > 0) K = add(Ks, random_modal_system(n_unstable, p, m, rng, 0.1, 1.5));
            if (!check_minimal(K).minimal) continue;
            StateSpace G = observer_based_partner(K);
            if (!is_internally_stable(G, K).stable || !check_minimal(G).minimal) continue;
            return {G, K};
        } catch (const Error&) {
            continue;
        }
    }
    throw Error(ErrorKind::Convergence, "instance synthesis failed after 20 attempts");
}

}  // namespace ctred
