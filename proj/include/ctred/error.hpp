#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ctred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using cplx = std::complex<double>;

enum class ErrorKind {
    Dimension,
    NonFinite,
    StabilityPrecondition,
    Convergence,
    NearSingularSeparation,
    IllConditionedReordering,
    IllConditionedSplit,
    NoStabilizingSolution,
    NotStabilizing,
    AxisPole,
    ZeroMode,
    Clustering,
    PartitionTie,
    OutOfRange,
    InfeasibleOrder,
    Unsupported,
    NotMinimal,
    WrongCertificate,
    Radius,
    Parse,
    Io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::StabilityPrecondition: return "stability-precondition";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::NearSingularSeparation: return "near-singular-separation";
    case ErrorKind::IllConditionedReordering: return "ill-conditioned-reordering";
    case ErrorKind::IllConditionedSplit: return "ill-conditioned-split";
    case ErrorKind::NoStabilizingSolution: return "no-stabilizing-solution";
    case ErrorKind::NotStabilizing: return "not-stabilizing";
    case ErrorKind::AxisPole: return "axis-pole";
    case ErrorKind::ZeroMode: return "zero-mode";
    case ErrorKind::Clustering: return "clustering";
    case ErrorKind::PartitionTie: return "partition-tie";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InfeasibleOrder: return "infeasible-order";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NotMinimal: return "not-minimal";
    case ErrorKind::WrongCertificate: return "wrong-certificate";
    case ErrorKind::Radius: return "radius";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Process-wide tolerance factors. The stability factor can be overridden
/// through CTRED_TOL_STAB (read once, on first use).
struct Tolerances {
    double stab = 1e-8;
    double sep = 1e-6;
};

inline Tolerances& tolerances() {
    static Tolerances t = [] {
        Tolerances v;
        if (const char* s = std::getenv("CTRED_TOL_STAB")) {
            char* end = nullptr;
            double f = std::strtod(s, &end);
            if (end != s && f > 0 && f < 1) v.stab = f;
        }
        return v;
    }();
    return t;
}

inline double inf_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    return A.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double tol_stab(const Matrix& A) { return tolerances().stab * std::max(1.0, inf_norm(A)); }

inline void require(bool cond, ErrorKind k, const std::string& msg) {
    if (!cond) throw Error(k, msg);
}

inline void require_finite(const Matrix& M, const char* name) {
    if (!M.allFinite()) throw Error(ErrorKind::NonFinite, std::string(name) + " has non-finite entries");
}

}  // namespace ctred
