#pragma once

#include "lti.hpp"

namespace ctred {

struct PartialFraction {
    struct Term {
        cplx p;
        int order;  // power j of 1/(s - p)^j
        cplx alpha;
    };
    std::vector<Term> terms;
    std::vector<double> polynomial_part;  // always empty: only strictly proper inputs are accepted

    cplx operator()(cplx s) const {
        cplx v = 0;
        for (auto& t : terms) v += t.alpha / std::pow(s - t.p, t.order);
        return v;
    }
};

namespace detail {

struct RootCluster {
    cplx root;
    int mult;
};

inline std::vector<RootCluster> cluster_roots(const std::vector<cplx>& rs) {
    std::vector<RootCluster> out;
    std::vector<int> count;
    std::vector<cplx> sum;
    for (auto& r : rs) {
        bool placed = false;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::abs(r - out[i].root) <= tol_pz(out[i].root)) {
                sum[i] += r;
                ++count[i];
                out[i].root = sum[i] / double(count[i]);
                out[i].mult = count[i];
                placed = true;
                break;
            }
        if (!placed) {
            out.push_back({r, 1});
            sum.push_back(r);
            count.push_back(1);
        }
    }
    return out;
}

inline CPoly pow_linear(cplx p, int k) {
    CPoly r = CPoly::constant(1.0);
    CPoly lin(std::vector<cplx>{-p, 1.0});
    for (int i = 0; i < k; ++i) r = r * lin;
    return r;
}

inline CPoly product_except(const std::vector<RootCluster>& cl, std::size_t skip) {
    CPoly r = CPoly::constant(1.0);
    for (std::size_t i = 0; i < cl.size(); ++i)
        if (i != skip) r = r * pow_linear(cl[i].root, cl[i].mult);
    return r;
}

// Quotient of synthetic division by (s - a); the remainder is dropped.
inline CPoly deflate(const CPoly& P, cplx a) {
    int n = P.degree();
    if (n <= 0) return CPoly();
    std::vector<cplx> q(n);
    cplx carry = 0;
    for (int i = n; i >= 1; --i) {
        carry = P.c[i] + carry * a;
        q[i - 1] = carry;
    }
    return CPoly(q);
}

}  // namespace detail

/// Partial fractions of a strictly proper rational function via Taylor
/// expansion at each (clustered) pole.
inline PartialFraction partial_fractions(const Rational& F) {
    require(F.num.degree() < F.den.degree(), ErrorKind::Unsupported, "partial_fractions: improper rational function");
    PartialFraction pf;
    if (F.num.degree() < 0) return pf;
    auto cl = detail::cluster_roots(roots(F.den));
    CPoly N = to_complex(F.num);
    cplx lead = F.den.lead();
    for (std::size_t i = 0; i < cl.size(); ++i) {
        cplx p = cl[i].root;
        int m = cl[i].mult;
        CPoly Q = lead * detail::product_except(cl, i);
        auto nt = taylor_shift(N, p);
        auto qt = taylor_shift(Q, p);
        // h = N / Q as a power series in (s - p), first m coefficients
        std::vector<cplx> h(m, 0.0);
        for (int k = 0; k < m; ++k) {
            cplx acc = k < int(nt.size()) ? nt[k] : 0.0;
            for (int j = 1; j <= k; ++j) acc -= (j < int(qt.size()) ? qt[j] : 0.0) * h[k - j];
            h[k] = acc / qt[0];
        }
        for (int k = 0; k < m; ++k) pf.terms.push_back({p, m - k, h[k]});
    }
    return pf;
}

struct ResidueFactorization {
    cplx p;
    cplx q;                 // nearest zero
    cplx residue;           // lim (s - p) F(s)
    cplx gap_product;       // p - q
    cplx remainder_r;       // n(p) / d(p)
    bool has_zero = true;   // false: gap is +inf and r is not defined
};

inline double nearest_zero_gap(const Rational& F, cplx p) {
    double g = std::numeric_limits<double>::infinity();
    for (auto& z : roots(F.num)) g = std::min(g, std::abs(z - p));
    return g;
}

/// Residue at a simple pole p written as (p - q) r with q the nearest zero.
/// Checked against the partial-fraction residue to 1e-8 relative.
inline ResidueFactorization residue_factorization(const Rational& F, cplx p) {
    auto dr = roots(F.den);
    int hits = 0;
    cplx pp = p;
    double best = std::numeric_limits<double>::infinity();
    for (auto& r : dr) {
        double d = std::abs(r - p);
        if (d <= tol_pz(p)) ++hits;
        if (d < best) {
            best = d;
            pp = r;
        }
    }
    require(hits >= 1, ErrorKind::OutOfRange, "p is not a pole");
    require(hits == 1, ErrorKind::Unsupported, "p is not a simple pole");
    PartialFraction pf = partial_fractions(F);
    cplx res_pf = 0;
    for (auto& t : pf.terms)
        if (t.order == 1 && std::abs(t.p - pp) <= tol_pz(pp)) res_pf = t.alpha;
    ResidueFactorization out;
    out.p = pp;
    auto zs = roots(F.num);
    if (zs.empty()) {
        out.has_zero = false;
        out.q = std::numeric_limits<double>::infinity();
        out.gap_product = std::numeric_limits<double>::infinity();
        out.residue = res_pf;
        out.remainder_r = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    cplx q = zs[0];
    for (auto& z : zs)
        if (std::abs(z - pp) < std::abs(q - pp)) q = z;
    out.q = q;
    CPoly n = detail::deflate(to_complex(F.num), q);
    CPoly d = detail::deflate(to_complex(F.den), pp);
    out.remainder_r = n(pp) / d(pp);
    out.gap_product = pp - q;
    out.residue = out.gap_product * out.remainder_r;
    double scale = std::max(std::abs(res_pf), std::abs(out.residue));
    // an exact cancellation leaves zero residue on both sides
    double tol = 1e-8 * std::max(scale, 1e-8 * std::abs(out.remainder_r) * (1 + std::abs(pp)));
    if (!(std::abs(out.residue - res_pf) <= tol))
        throw Error(ErrorKind::Convergence, "residue factorization disagrees with partial fractions");
    return out;
}

struct CancellationProbe {
    bool success = false;
    std::vector<cplx> zeros_in_ball;
    std::vector<cplx> zeros;
};

/// Scale every partial-fraction coefficient at pole p and count numerator
/// zeros within eps of p; success when the count equals the pole order.
inline CancellationProbe small_block_cancellation_probe(const PartialFraction& pf, cplx p, double scale, double eps) {
    int np = 0;
    for (auto& t : pf.terms)
        if (std::abs(t.p - p) <= tol_pz(p)) np = std::max(np, t.order);
    require(np > 0, ErrorKind::OutOfRange, "p is not a pole of the partial fraction");
    std::vector<detail::RootCluster> others;
    for (auto& t : pf.terms) {
        if (std::abs(t.p - p) <= tol_pz(p)) continue;
        bool seen = false;
        for (auto& o : others)
            if (std::abs(o.root - t.p) <= tol_pz(o.root)) {
                o.mult = std::max(o.mult, t.order);
                seen = true;
            }
        if (!seen) others.push_back({t.p, t.order});
    }
    CPoly drest = detail::product_except(others, others.size());
    CPoly u;
    for (auto& t : pf.terms) {
        if (std::abs(t.p - p) <= tol_pz(p)) continue;
        std::size_t k = 0;
        while (std::abs(others[k].root - t.p) > tol_pz(others[k].root)) ++k;
        CPoly term = detail::pow_linear(others[k].root, others[k].mult - t.order) * detail::product_except(others, k);
        u = u + t.alpha * term;
    }
    for (auto& z : roots(u))
        if (std::abs(z - p) <= eps) throw Error(ErrorKind::Radius, "eps reaches a zero of the remaining part");
    CPoly near;
    for (auto& t : pf.terms)
        if (std::abs(t.p - p) <= tol_pz(p)) near = near + (scale * t.alpha) * detail::pow_linear(p, np - t.order);
    CPoly N = near * drest + u * detail::pow_linear(p, np);
    CancellationProbe out;
    out.zeros = roots(N);
    for (auto& z : out.zeros)
        if (std::abs(z - p) <= eps) out.zeros_in_ball.push_back(z);
    out.success = static_cast<int>(out.zeros_in_ball.size()) == np;
    return out;
}

struct DeltaSearch {
    bool found = false;
    double delta = 0;  // largest scale found for which the probe succeeds
    int probes = 0;
};

/// Empirical delta(eps): halve the scale until the probe succeeds, then bisect.
inline DeltaSearch find_cancellation_scale(const PartialFraction& pf, cplx p, double eps) {
    DeltaSearch out;
    double hi = 1.0, lo = 1.0;
    auto ok = [&](double s) {
        ++out.probes;
        return small_block_cancellation_probe(pf, p, s, eps).success;
    };
    if (ok(1.0)) {
        out.found = true;
        out.delta = 1.0;
        return out;
    }
    bool hit = false;
    for (int i = 0; i < 1100; ++i) {
        hi = lo;
        lo *= 0.5;
        if (lo == 0.0) break;
        if (ok(lo)) {
            hit = true;
            break;
        }
    }
    if (!hit) return out;
    for (int i = 0; i < 60 && hi - lo > 1e-12 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    out.found = true;
    out.delta = lo;
    return out;
}

}  // namespace ctred
