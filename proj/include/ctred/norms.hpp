#pragma once

#include <cmath>

#include "realization.hpp"

namespace ctred {

namespace detail {

inline void require_hurwitz(const StateSpace& S, const char* who) {
    if (!is_hurwitz(S.A))
        throw Error(ErrorKind::StabilityPrecondition,
                    std::string(who) + ": system not stable (abscissa " + std::to_string(spectral_abscissa(S.A)) + ")");
}

inline double h2_gramian(const StateSpace& S) {
    if (S.order() == 0) return 0.0;
    Matrix Wc = solve_lyapunov(S.A, S.B * S.B.transpose());
    double v = (S.C * Wc * S.C.transpose()).trace();
    return std::sqrt(std::max(0.0, v));
}

// Candidate frequencies: log grid spanning the pole magnitudes, the pole
// frequencies themselves and zero.
inline std::vector<double> peak_grid(const StateSpace& S) {
    std::vector<double> w{0.0};
    auto ev = eigenvalues(S.A);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (auto& l : ev) {
        double a = std::abs(l);
        if (a > 0) {
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        if (l.imag() > 0) w.push_back(l.imag());
    }
    if (!(hi > 0)) {
        lo = 1.0;
        hi = 1.0;
    }
    double a = std::log10(lo) - 2, b = std::log10(hi) + 2;
    for (int i = 0; i < 200; ++i) w.push_back(std::pow(10.0, a + (b - a) * i / 199.0));
    return w;
}

// Frequencies where the gamma-Hamiltonian has imaginary eigenvalues with a
// confirming singular value; empty when gamma is an upper bound.
inline std::vector<double> hamiltonian_crossings(const StateSpace& S, double g) {
    Index n = S.order(), m = S.inputs(), p = S.outputs();
    Matrix R = g * g * Matrix::Identity(m, m) - S.D.transpose() * S.D;
    Matrix Ri = R.inverse();
    Matrix Ah = S.A + S.B * Ri * S.D.transpose() * S.C;
    Matrix H(2 * n, 2 * n);
    H << Ah, S.B * Ri * S.B.transpose(),
        -S.C.transpose() * (Matrix::Identity(p, p) + S.D * Ri * S.D.transpose()) * S.C, -Ah.transpose();
    double tol = 1e-7 * std::max(1.0, inf_norm(H));
    std::vector<double> out;
    for (auto& l : eigenvalues(H))
        if (std::abs(l.real()) <= tol && l.imag() >= 0) {
            double w = l.imag();
            if (sigma_max(S, w) >= g * (1 - 1e-6)) out.push_back(w);
        }
    return out;
}

inline double peak_gain(const StateSpace& S) {
    if (S.order() == 0) return S.D.size() ? Eigen::JacobiSVD<Matrix>(S.D).singularValues()(0) : 0.0;
    double lo = S.D.size() ? Eigen::JacobiSVD<Matrix>(S.D).singularValues()(0) : 0.0;
    double attained = lo, w_best = -1;  // w_best < 0: attained at infinity
    auto probe = [&](double w) {
        double v = sigma_max(S, w);
        if (v > attained) attained = v, w_best = w;
        return v;
    };
    for (double w : peak_grid(S)) lo = std::max(lo, probe(w));
    if (lo == 0.0) return 0.0;
    double hi = 2 * lo;
    int guard = 0;
    while (!hamiltonian_crossings(S, hi).empty()) {
        hi *= 2;
        if (++guard > 60) throw Error(ErrorKind::Convergence, "no upper bound for the peak gain");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-8 * lo; ++it) {
        double mid = 0.5 * (lo + hi);
        double best = 0;
        for (double w : hamiltonian_crossings(S, mid)) best = std::max(best, probe(w));
        // mid is a lower bound only if a crossing really attains it; the
        // loose confirmation in hamiltonian_crossings is not enough
        if (best >= mid * (1 - 1e-10)) {
            lo = std::max(mid, std::min(hi, best));
        } else {
            lo = std::max(lo, best);
            hi = mid;
        }
    }
    // golden-section polish around the best frequency; an attained value
    // within the bracket beats the midpoint
    if (w_best > 0) {
        double a = std::log(w_best) - 0.05, b = std::log(w_best) + 0.05;
        const double r = 0.5 * (std::sqrt(5.0) - 1);
        for (int it = 0; it < 80; ++it) {
            double x1 = b - r * (b - a), x2 = a + r * (b - a);
            if (probe(std::exp(x1)) >= probe(std::exp(x2))) b = x2;
            else a = x1;
        }
    }
    if (hi - attained <= 1e-8 * attained) return std::min(attained, hi);
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// H2 norm of a stable, strictly proper system.
inline double h2_norm(const StateSpace& S) {
    detail::require_hurwitz(S, "h2_norm");
    require(S.D.isZero(0.0), ErrorKind::Unsupported, "h2_norm: nonzero feedthrough (D != 0)");
    return detail::h2_gramian(S);
}

/// H-infinity norm of a stable system (Hamiltonian bisection).
inline double hinf_norm(const StateSpace& S) {
    detail::require_hurwitz(S, "hinf_norm");
    return detail::peak_gain(S);
}

/// L-infinity norm; requires no poles on the imaginary axis.
inline double linf_norm(const StateSpace& S) {
    double tol = tol_stab(S.A);
    for (auto& l : eigenvalues(S.A))
        if (std::abs(l.real()) <= tol) throw Error(ErrorKind::AxisPole, "linf_norm: pole on the imaginary axis");
    return detail::peak_gain(S);
}

/// L2 norm of a strictly proper system without axis poles.
inline double l2_norm(const StateSpace& S) {
    require(S.D.isZero(0.0), ErrorKind::Unsupported, "l2_norm: nonzero feedthrough (D != 0)");
    StableUnstableSplit sp = detail::split_core(S, false);
    const StateSpace& u = sp.unstable;
    StateSpace mirror{-u.A.transpose(), u.C.transpose(), u.B.transpose(), Matrix::Zero(u.inputs(), u.outputs())};
    double a = detail::h2_gramian(sp.stable), b = detail::h2_gramian(mirror);
    return std::sqrt(a * a + b * b);
}

/// Transfer-function norms that look through uncontrollable or unobservable
/// unstable modes. +inf when the transfer function itself is unstable.
inline double hinf_transfer(const StateSpace& S) {
    auto r = stable_realization(S);
    return r ? hinf_norm(*r) : std::numeric_limits<double>::infinity();
}

inline double h2_transfer(const StateSpace& S) {
    auto r = stable_realization(S);
    return r ? h2_norm(*r) : std::numeric_limits<double>::infinity();
}

}  // namespace ctred
