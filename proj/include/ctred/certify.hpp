#pragma once

#include <map>
#include <string>

#include "reduce.hpp"

namespace ctred {

enum class Theorem { Lemma3, Thm1, Thm2, Cor1, Cor2, Thm3 };

inline const char* to_string(Theorem t) {
    switch (t) {
    case Theorem::Lemma3: return "lemma3";
    case Theorem::Thm1: return "thm1";
    case Theorem::Thm2: return "thm2";
    case Theorem::Cor1: return "cor1";
    case Theorem::Cor2: return "cor2";
    case Theorem::Thm3: return "thm3";
    }
    return "?";
}

struct ReductionCertificate {
    Theorem theorem = Theorem::Thm2;
    std::map<std::string, double> quantities;  // +inf marks an undefined norm
    bool condition_satisfied = false;
    std::optional<double> cost_bound;
    bool verified_stable = false;
    std::string reason;
};

struct LqgCost {
    double total = 0;
    double X = 0, XK = 0, KX = 0, KY = 0;  // squared H2 norms of the four blocks
};

/// J(K) with its four-block breakdown.
inline LqgCost lqg_cost_blocks(const StateSpace& G, const StateSpace& K) {
    auto st = is_internally_stable(G, K);
    if (!st.stable) throw Error(ErrorKind::NotStabilizing, "controller does not stabilize the plant: infinite cost");
    FourBlock F = four_block(G, K);
    LqgCost c;
    double t = h2_norm(F.T);
    c.total = t * t;
    auto sq = [](double v) { return v * v; };
    c.X = sq(h2_norm(F.X()));
    c.XK = sq(h2_norm(F.XK()));
    c.KX = sq(h2_norm(F.KX()));
    c.KY = sq(h2_norm(F.KY()));
    return c;
}

/// Normalized LQG cost: squared H2 norm of the closed-loop four-block map.
inline double lqg_cost(const StateSpace& G, const StateSpace& K) {
    auto st = is_internally_stable(G, K);
    if (!st.stable) throw Error(ErrorKind::NotStabilizing, "controller does not stabilize the plant: infinite cost");
    double t = h2_norm(four_block(G, K).T);
    return t * t;
}

/// Norms of the nominal loop shared by all certificates.
struct LoopNorms {
    double J, X_hinf, X_h2, Y_hinf, XK_h2, KX_hinf, KX_h2, KY_h2;
    StateSpace X, Y;
};

inline LoopNorms loop_norms(const StateSpace& G, const StateSpace& K) {
    SensitivityPair sp = sensitivity_pair(G, K);
    FourBlock F = four_block(G, K);
    LoopNorms n;
    n.X = sp.X;
    n.Y = sp.Y;
    double t = h2_norm(F.T);
    n.J = t * t;
    n.X_hinf = hinf_norm(sp.X);
    n.X_h2 = h2_norm(sp.X);
    n.Y_hinf = hinf_norm(sp.Y);
    n.XK_h2 = h2_norm(F.XK());
    n.KX_hinf = hinf_norm(F.KX());
    n.KX_h2 = h2_norm(F.KX());
    n.KY_h2 = h2_norm(F.KY());
    return n;
}

/// Minimal realization of the truncation error and its norms.
struct DeltaNorms {
    StateSpace sys;
    bool stable = false;
    double hinf = 0, h2 = 0, linf = 0, l2 = 0;
};

inline DeltaNorms delta_norms(const StateSpace& delta) {
    const double inf = std::numeric_limits<double>::infinity();
    DeltaNorms d;
    d.sys = minimal_realization(delta);
    bool proper = d.sys.D.isZero(0.0);  // feedthrough makes the 2-norms infinite
    d.stable = d.sys.order() == 0 || spectral_abscissa(d.sys.A) < -tol_stab(delta.A);
    if (d.stable) {
        d.hinf = hinf_norm(d.sys);
        d.h2 = proper ? h2_norm(d.sys) : inf;
        d.linf = d.hinf;
        d.l2 = d.h2;
        return d;
    }
    d.hinf = d.h2 = inf;
    try {
        d.linf = linf_norm(d.sys);
        d.l2 = proper ? l2_norm(d.sys) : inf;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::AxisPole) throw;
        d.linf = d.l2 = inf;
    }
    return d;
}

namespace detail {

inline void record_loop(ReductionCertificate& c, const LoopNorms& n) {
    c.quantities["J_K"] = n.J;
    c.quantities["X_hinf"] = n.X_hinf;
    c.quantities["X_h2"] = n.X_h2;
    c.quantities["Y_hinf"] = n.Y_hinf;
    c.quantities["XK_h2"] = n.XK_h2;
    c.quantities["KX_hinf"] = n.KX_hinf;
    c.quantities["KX_h2"] = n.KX_h2;
    c.quantities["KY_h2"] = n.KY_h2;
}

inline double linf_or_inf(const StateSpace& S) {
    StateSpace m = minimal_realization(S);
    try {
        return linf_norm(m);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::AxisPole) throw;
        return std::numeric_limits<double>::infinity();
    }
}

struct PoleCount {
    int unstable = 0;
    int axis = 0;
};

inline PoleCount count_poles(const StateSpace& S) {
    PoleCount c;
    double tol = tol_stab(S.A);
    for (auto& l : poles(S)) {
        if (std::abs(l.real()) <= tol)
            ++c.axis;
        else if (l.real() > 0)
            ++c.unstable;
    }
    return c;
}

// Bound shared by thm2, cor1 and cor2; `coef` multiplies the
// ||Delta||_H2 term of S1.
inline void stable_delta_bound(ReductionCertificate& c, const LoopNorms& n, const DeltaNorms& d, double coef) {
    double S1 = 2 * d.hinf * n.X_h2 * n.XK_h2 +
                coef * d.h2 * (n.KY_h2 * n.Y_hinf + n.KX_h2 * n.X_hinf) * (1 + n.KX_hinf);
    double S2 = d.hinf * d.hinf * n.X_h2 * n.X_h2 +
                d.h2 * d.h2 * (n.Y_hinf * n.Y_hinf + n.X_hinf * n.X_hinf) * (1 + n.KX_hinf) * (1 + n.KX_hinf);
    c.quantities["S1"] = S1;
    c.quantities["S2"] = S2;
    double g = 1 - n.X_hinf * d.hinf;
    c.cost_bound = (n.J + S1 + S2) / (g * g);
}

inline ReductionCertificate stable_delta_certificate(Theorem th, const StateSpace& G, const StateSpace& K,
                                                      const StateSpace& K_r, const StateSpace& delta, double coef) {
    ReductionCertificate c;
    c.theorem = th;
    LoopNorms n = loop_norms(G, K);
    detail::record_loop(c, n);
    DeltaNorms d = delta_norms(delta);
    c.quantities["Delta_hinf"] = d.hinf;
    c.quantities["Delta_h2"] = d.h2;
    c.verified_stable = is_internally_stable(G, K_r).stable;
    if (!d.stable) {
        c.reason = "truncation error is unstable; its H-infinity norm is undefined";
        return c;
    }
    c.condition_satisfied = d.hinf * n.X_hinf < 1;
    if (!c.condition_satisfied) {
        c.reason = "||Delta||_Hinf * ||X||_Hinf >= 1";
        return c;
    }
    stable_delta_bound(c, n, d, coef);
    return c;
}

}  // namespace detail

/// Classical condition: equal unstable pole counts and an L-infinity small gain.
inline ReductionCertificate check_lemma3(const StateSpace& G, const StateSpace& K, const StateSpace& K_r,
                                         const StateSpace& delta) {
    ReductionCertificate c;
    c.theorem = Theorem::Lemma3;
    LoopNorms n = loop_norms(G, K);
    detail::record_loop(c, n);
    DeltaNorms d = delta_norms(delta);
    c.verified_stable = is_internally_stable(G, K_r).stable;
    auto pk = detail::count_poles(K), pr = detail::count_poles(K_r);
    c.quantities["unstable_poles_K"] = pk.unstable;
    c.quantities["unstable_poles_Kr"] = pr.unstable;
    double xd = detail::linf_or_inf(series(n.X, d.sys));
    double dx = detail::linf_or_inf(series(d.sys, n.X));
    c.quantities["XDelta_linf"] = xd;
    c.quantities["DeltaX_linf"] = dx;
    c.quantities["Delta_linf"] = d.linf;
    bool a = pk.axis == 0 && pr.axis == 0 && pk.unstable == pr.unstable;
    bool b = std::min(xd, dx) < 1;
    c.condition_satisfied = a && b;
    if (pk.axis || pr.axis)
        c.reason = "imaginary-axis poles make the unstable pole count ill-defined";
    else if (!a)
        c.reason = "unstable pole counts differ";
    else if (!b)
        c.reason = "L-infinity small-gain condition fails";
    return c;
}

inline ReductionCertificate check_lemma3(const StateSpace& G, const StateSpace& K, const StateSpace& K_r) {
    return check_lemma3(G, K, K_r, subtract(K_r, K));
}

/// Stability condition: Delta Y stable and max(||X Delta||, ||Delta X||)_Hinf < 1.
inline ReductionCertificate check_thm1(const StateSpace& G, const StateSpace& K, const StateSpace& K_r,
                                       const StateSpace& delta) {
    ReductionCertificate c;
    c.theorem = Theorem::Thm1;
    LoopNorms n = loop_norms(G, K);
    detail::record_loop(c, n);
    DeltaNorms d = delta_norms(delta);
    c.verified_stable = is_internally_stable(G, K_r).stable;
    bool dy = is_stable_transfer(series(d.sys, n.Y));
    double xd = hinf_transfer(series(n.X, d.sys));
    double dx = hinf_transfer(series(d.sys, n.X));
    c.quantities["XDelta_hinf"] = xd;
    c.quantities["DeltaX_hinf"] = dx;
    c.quantities["DeltaY_stable"] = dy ? 1.0 : 0.0;
    c.condition_satisfied = dy && std::max(xd, dx) < 1;
    if (!dy)
        c.reason = "Delta (I - G K)^-1 is unstable";
    else if (!std::isfinite(std::max(xd, dx)))
        c.reason = "product with X is unstable";
    else if (!c.condition_satisfied)
        c.reason = "H-infinity small-gain condition fails";
    return c;
}

inline ReductionCertificate check_thm1(const StateSpace& G, const StateSpace& K, const StateSpace& K_r) {
    return check_thm1(G, K, K_r, subtract(K_r, K));
}

/// LQG perturbation bound for a stable truncation error.
inline ReductionCertificate check_thm2_bound(const StateSpace& G, const StateSpace& K, const StateSpace& K_r,
                                             const StateSpace& delta) {
    return detail::stable_delta_certificate(Theorem::Thm2, G, K, K_r, delta, 2.0);
}

inline ReductionCertificate check_thm2_bound(const StateSpace& G, const StateSpace& K, const StateSpace& K_r) {
    return check_thm2_bound(G, K, K_r, subtract(K_r, K));
}

/// Balanced-truncation corollary: Hankel tail below 1/(2 ||X||_Hinf).
inline ReductionCertificate check_cor1(const StateSpace& G, const StateSpace& K, const TruncationResult& bt) {
    ReductionCertificate c;
    c.theorem = Theorem::Cor1;
    LoopNorms n = loop_norms(G, K);
    detail::record_loop(c, n);
    double tail = bt.tail_sum();
    c.quantities["sigma_tail"] = tail;
    c.verified_stable = is_internally_stable(G, bt.reduced).stable;
    c.condition_satisfied = tail < 1.0 / (2 * n.X_hinf);
    if (!c.condition_satisfied) {
        c.reason = "Hankel tail exceeds 1/(2 ||X||_Hinf)";
        return c;
    }
    DeltaNorms d = delta_norms(bt.delta);
    c.quantities["Delta_hinf"] = d.hinf;
    c.quantities["Delta_h2"] = d.h2;
    if (!d.stable) throw Error(ErrorKind::WrongCertificate, "balanced truncation error must be stable");
    detail::stable_delta_bound(c, n, d, 2.0);
    return c;
}

/// Stable-part modal truncation corollary (S1 carries coefficient 1 on the H2 term).
inline ReductionCertificate check_cor2(const StateSpace& G, const StateSpace& K, const StateSpace& K_r,
                                       const StateSpace& delta) {
    if (!is_stable_transfer(delta))
        throw Error(ErrorKind::WrongCertificate, "truncation error is unstable; use thm3");
    return detail::stable_delta_certificate(Theorem::Cor2, G, K, K_r, delta, 1.0);
}

inline ReductionCertificate check_cor2(const StateSpace& G, const StateSpace& K, const StateSpace& K_r) {
    return check_cor2(G, K, K_r, subtract(K_r, K));
}

/// Unstable SISO truncation: (1 - X Delta)^-1 stable, with the mixed-norm cost bound.
inline ReductionCertificate check_thm3(const StateSpace& G, const StateSpace& K, const StateSpace& K_r,
                                       const StateSpace& delta) {
    require(G.siso() && K.siso() && K_r.siso(), ErrorKind::Unsupported, "thm3 applies to SISO systems only");
    ReductionCertificate c;
    c.theorem = Theorem::Thm3;
    LoopNorms n = loop_norms(G, K);
    detail::record_loop(c, n);
    // Y has unit feedthrough, so its H2 norm is read as that of Y - 1 = XK.
    double Y_h2 = n.XK_h2;
    c.quantities["Y_h2"] = Y_h2;
    DeltaNorms d = delta_norms(delta);
    double tol = tol_stab(delta.A);
    for (auto& l : eigenvalues(d.sys.A))
        if (std::abs(l) <= tol) throw Error(ErrorKind::ZeroMode, "truncation error has a pole at the origin");
    c.quantities["Delta_linf"] = d.linf;
    c.quantities["Delta_l2"] = d.l2;
    c.verified_stable = is_internally_stable(G, K_r).stable;
    StateSpace M = invert(identity_plus(negate(series(n.X, d.sys))));
    double mi = hinf_transfer(M);
    c.quantities["inv_one_minus_XDelta_hinf"] = mi;
    if (!std::isfinite(mi)) {
        c.reason = "(1 - X Delta)^-1 is unstable";
        return c;
    }
    if (!std::isfinite(d.linf)) {
        c.reason = "truncation error has imaginary-axis poles";
        return c;
    }
    c.condition_satisfied = true;
    double S1 = 2 * d.linf * n.X_h2 * n.XK_h2 + 2 * n.KY_h2 * (d.l2 * n.Y_hinf) +
                2 * n.KY_h2 * (d.linf * (Y_h2 + n.KX_h2 * n.Y_hinf + n.KX_hinf * n.X_h2));
    double t2 = n.Y_hinf * (d.linf * n.KX_h2 + d.l2);
    double t3 = d.linf * n.KX_hinf + d.linf;
    double S2 = d.linf * d.linf * n.X_h2 * n.X_h2 + t2 * t2 + n.X_h2 * n.X_h2 * t3 * t3;
    c.quantities["S1"] = S1;
    c.quantities["S2"] = S2;
    c.cost_bound = mi * mi * (n.J + S1 + S2);
    return c;
}

inline ReductionCertificate check_thm3(const StateSpace& G, const StateSpace& K, const StateSpace& K_r) {
    return check_thm3(G, K, K_r, subtract(K_r, K));
}

}  // namespace ctred
