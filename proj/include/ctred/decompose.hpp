#pragma once

#include "norms.hpp"

namespace ctred {

/// K = K_< + K_>= with a well-conditioned block-diagonalizing transform.
/// Eigenvalues on the imaginary axis are rejected.
inline StableUnstableSplit split_stable_unstable(const StateSpace& K) { return detail::split_core(K, false); }

struct ModalBlock {
    StateSpace sys;                    // (A_i, B_i, C_i, 0)
    cplx lambda;                       // representative eigenvalue (Im >= 0)
    std::optional<double> importance;  // empty for modes that cannot be ranked
};

struct ModalDecomposition {
    std::vector<ModalBlock> blocks;
    Matrix D;

    StateSpace assemble(const std::vector<std::size_t>& keep) const {
        StateSpace S = static_gain(D);
        for (std::size_t i : keep) S = add(S, blocks[i].sys);
        return S;
    }
};

/// Mode importance: H-infinity norm of a stable block, DC gain of an
/// antistable one. Zero and imaginary-axis modes are rejected.
inline double mode_importance(const StateSpace& block) {
    auto ev = eigenvalues(block.A);
    require(!ev.empty(), ErrorKind::Dimension, "mode_importance: empty block");
    double re = 0;
    double mag = 0;
    for (auto& l : ev) {
        re += l.real();
        mag = std::max(mag, std::abs(l));
    }
    re /= static_cast<double>(ev.size());
    double tol = tol_stab(block.A);
    if (mag <= tol) throw Error(ErrorKind::ZeroMode, "mode at the origin has no importance");
    if (std::abs(re) <= tol) throw Error(ErrorKind::AxisPole, "mode on the imaginary axis has no importance");
    StateSpace b = block;
    b.D.setZero();
    if (re < 0) return hinf_norm(b);
    Matrix G = b.C * b.A.fullPivLu().solve(b.B);
    return G.size() ? Eigen::JacobiSVD<Matrix>(G).singularValues()(0) : 0.0;
}

/// Block-diagonal modal realization; eigenvalues within cluster_tol
/// (relative) share one block. Blocks are sorted by real part, then |Im|.
inline ModalDecomposition modal_form(const StateSpace& K, double cluster_tol = 1e-6) {
    ModalDecomposition out;
    out.D = K.D;
    Index n = K.order();
    if (n == 0) return out;
    auto close = [cluster_tol](cplx a, cplx b) { return std::abs(a - b) <= cluster_tol * (1.0 + std::abs(a)); };
    SchurForm sf = real_schur(K.A);
    reorder_schur(sf, [&](cplx a, cplx b) {
        if (close(a, b)) return false;
        if (a.real() != b.real()) return a.real() < b.real();
        return std::abs(a.imag()) < std::abs(b.imag());
    });
    // group consecutive blocks
    std::vector<std::pair<Index, Index>> groups;  // start, size
    std::vector<cplx> reps;
    auto st = sf.starts();
    for (std::size_t b = 0; b < sf.blocks.size(); ++b) {
        cplx l = sf.block_eigenvalue(b);
        if (!groups.empty() && close(reps.back(), l)) {
            groups.back().second += sf.blocks[b];
        } else {
            groups.push_back({st[b], sf.blocks[b]});
            reps.push_back(l);
        }
    }
    for (std::size_t a = 0; a < reps.size(); ++a)
        for (std::size_t b = a + 1; b < reps.size(); ++b)
            if (close(reps[a], reps[b]))
                throw Error(ErrorKind::Clustering, "eigenvalue cluster is not contiguous after sorting");
    Matrix T = sf.T;
    Matrix B = sf.Z.transpose() * K.B;
    Matrix C = K.C * sf.Z;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        Index r0 = groups[g].first, k = groups[g].second, rest = n - r0 - k;
        Matrix T11 = T.block(r0, r0, k, k), T12 = T.block(r0, r0 + k, k, rest), T22 = T.block(r0 + k, r0 + k, rest, rest);
        Matrix X;
        try {
            X = solve_sylvester(T11, -T22, T12);
        } catch (const Error& e) {
            throw Error(ErrorKind::Clustering, std::string("modes too close to decouple: ") + e.what());
        }
        B.middleRows(r0, k) -= X * B.bottomRows(rest);
        C.rightCols(rest) += C.middleCols(r0, k) * X;
        T.block(r0, r0 + k, k, rest).setZero();
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Index r0 = groups[g].first, k = groups[g].second;
        ModalBlock mb;
        mb.sys = StateSpace{T.block(r0, r0, k, k), B.middleRows(r0, k), C.middleCols(r0, k),
                            Matrix::Zero(K.outputs(), K.inputs())};
        mb.lambda = reps[g];
        try {
            mb.importance = mode_importance(mb.sys);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroMode && e.kind() != ErrorKind::AxisPole) throw;
        }
        out.blocks.push_back(std::move(mb));
    }
    return out;
}

}  // namespace ctred
