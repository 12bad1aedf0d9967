#pragma once

#include <future>

#include "fixtures.hpp"
#include "io.hpp"
#include "random.hpp"

// Reproduction drivers for the worked examples. Each returns a struct for
// programmatic checks and a JSON report.
namespace ctred::experiments {

struct Table1 {
    double J_K, J_bt, J_mt;
    double delta_bt_hinf, delta_mt_hinf;
    std::vector<cplx> closed_loop_poles;
    TruncationResult bt, mt;
    ReductionCertificate cor1, cor2, thm1_bt, lemma3_bt;
};

inline Table1 table1() {
    StateSpace G = fixtures::table1_plant(), K = fixtures::table1_controller();
    Table1 t;
    t.J_K = lqg_cost(G, K);
    t.bt = balanced_truncate_unstable(K, 2);
    t.mt = modal_truncate_stable(K, 1);
    t.J_bt = lqg_cost(G, t.bt.reduced);
    t.J_mt = lqg_cost(G, t.mt.reduced);
    t.delta_bt_hinf = hinf_norm(t.bt.delta);
    t.delta_mt_hinf = hinf_norm(t.mt.delta);
    t.closed_loop_poles = is_internally_stable(G, K).poles;
    std::sort(t.closed_loop_poles.begin(), t.closed_loop_poles.end(),
              [](cplx a, cplx b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
    t.cor1 = check_cor1(G, K, t.bt);
    t.cor2 = check_cor2(G, K, t.mt.reduced, t.mt.delta);
    t.thm1_bt = check_thm1(G, K, t.bt.reduced, t.bt.delta);
    t.lemma3_bt = check_lemma3(G, K, t.bt.reduced, t.bt.delta);
    return t;
}

inline json to_json(const Table1& t) {
    json j;
    j["experiment"] = "table1";
    j["instance"] = "third-order plant with a third-order controller (one antistable mode); stable part reduced by one state";
    j["costs"] = {{"J_K", t.J_K}, {"J_balanced", t.J_bt}, {"J_modal", t.J_mt}};
    j["norms"] = {{"delta_balanced_hinf", t.delta_bt_hinf}, {"delta_modal_hinf", t.delta_mt_hinf}};
    j["closed_loop_poles"] = complex_list(t.closed_loop_poles);
    j["reduced_balanced"] = system_to_json(t.bt.reduced);
    j["reduced_modal"] = system_to_json(t.mt.reduced);
    j["certificates"] = {certificate_to_json(t.cor1), certificate_to_json(t.cor2), certificate_to_json(t.thm1_bt),
                         certificate_to_json(t.lemma3_bt)};
    return j;
}

struct Unstable {
    double J_K, J_Kr;
    StateSpace K_r;
    TruncationResult mt;
    bool Kr_stabilizing;
    std::vector<cplx> closed_loop_poles_Kr;
    ReductionCertificate thm3, lemma3;
};

inline Unstable unstable() {
    StateSpace G = fixtures::unstable_plant(), K = fixtures::unstable_controller();
    Unstable u;
    u.J_K = lqg_cost(G, K);
    u.mt = modal_truncate(K, 1);
    u.K_r = u.mt.reduced;
    auto st = is_internally_stable(G, u.K_r);
    u.Kr_stabilizing = st.stable;
    u.closed_loop_poles_Kr = st.poles;
    u.J_Kr = st.stable ? lqg_cost(G, u.K_r) : std::numeric_limits<double>::infinity();
    u.thm3 = check_thm3(G, K, u.K_r, u.mt.delta);
    u.lemma3 = check_lemma3(G, K, u.K_r, u.mt.delta);
    return u;
}

inline json to_json(const Unstable& u) {
    json j;
    j["experiment"] = "unstable";
    j["instance"] = "third-order plant with a modal controller diag(1.37, -0.37, 0.34); least important mode removed";
    j["costs"] = {{"J_K", u.J_K}, {"J_Kr", number(u.J_Kr)}};
    j["reduced"] = system_to_json(u.K_r);
    j["Kr_stabilizing"] = u.Kr_stabilizing;
    j["closed_loop_poles_Kr"] = complex_list(u.closed_loop_poles_Kr);
    j["certificates"] = {certificate_to_json(u.thm3), certificate_to_json(u.lemma3)};
    return j;
}

struct ScalingRow {
    double eps, delta_hinf, gap_ratio;
};

struct Scaling {
    std::vector<ScalingRow> rows;
    double slope = 0, intercept = 0, r2 = 0;
    StateSpace G;
};

/// Least-squares line through (x, y) with its coefficient of determination.
inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept,
                       double& r2) {
    double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    slope = sxy / sxx;
    intercept = my - slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (slope * x[i] + intercept);
        sse += e * e;
    }
    r2 = syy > 0 ? 1 - sse / syy : 1.0;
}

/// Cost gap of K_r against K = K_r + Delta(eps) for 30 equally spaced eps.
/// The plant is the observer-based partner of K at the largest eps.
inline Scaling scaling(int points = 30, double eps_lo = 1e-4, double eps_hi = 0.05) {
    StateSpace Kr = fixtures::scaling_base();
    Scaling s;
    s.G = observer_based_partner(add(Kr, fixtures::scaling_delta(eps_hi)));
    require(is_internally_stable(s.G, Kr).stable, ErrorKind::NotStabilizing, "scaling plant does not stabilize K_r");
    double JKr = lqg_cost(s.G, Kr);
    std::vector<std::future<ScalingRow>> jobs;
    for (int i = 0; i < points; ++i) {
        double eps = eps_lo + (eps_hi - eps_lo) * i / (points - 1);
        jobs.push_back(std::async(std::launch::async, [&s, Kr, JKr, eps] {
            StateSpace D = fixtures::scaling_delta(eps);
            double JK = lqg_cost(s.G, add(Kr, D));
            return ScalingRow{eps, hinf_norm(D), (JKr - JK) / JK};
        }));
    }
    std::vector<double> x, y;
    for (auto& f : jobs) {
        s.rows.push_back(f.get());
        x.push_back(s.rows.back().delta_hinf);
        y.push_back(s.rows.back().gap_ratio);
    }
    linear_fit(x, y, s.slope, s.intercept, s.r2);
    return s;
}

inline std::string scaling_csv(const Scaling& s) {
    std::ostringstream o;
    o.precision(17);
    o << "epsilon,delta_hinf,cost_gap_ratio\n";
    for (auto& r : s.rows) o << r.eps << ',' << r.delta_hinf << ',' << r.gap_ratio << '\n';
    return o.str();
}

inline json to_json(const Scaling& s) {
    json j;
    j["experiment"] = "scaling";
    j["instance"] = "third-order base controller plus a first-order component of H-infinity norm eps; plant "
                    "synthesized deterministically (observer-based design on the largest-eps controller)";
    j["note"] = "the plant of the original figure is not published, so only the linear trend is comparable";
    json rows = json::array();
    for (auto& r : s.rows) rows.push_back({{"epsilon", r.eps}, {"delta_hinf", r.delta_hinf}, {"cost_gap_ratio", r.gap_ratio}});
    j["rows"] = rows;
    j["fit"] = {{"slope", s.slope}, {"intercept", s.intercept}, {"r2", s.r2}};
    j["plant"] = system_to_json(s.G);
    return j;
}

/// Type-7 (linear interpolation) sample quantile.
inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1) * q;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    if (v[hi] == v[lo]) return v[lo];
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Comparison {
    std::vector<double> ratio_bt, ratio_mt, delta_bt, delta_mt;
    double iqr_bt = 0, iqr_mt = 0;
    int unstable_bt = 0, unstable_mt = 0;
};

/// Balanced vs modal truncation of the stable part on random order-4
/// controllers (random stable third-order part plus a fixed antistable mode).
inline Comparison bt_vs_mt(int trials = 30, std::uint64_t seed = 2024) {
    Comparison c;
    const double inf = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    int made = 0;
    while (made < trials) {
        StateSpace K = add(random_stable_minimal(3, 1, 1, rng), fixtures::appendix_antistable());
        StateSpace G;
        try {
            G = observer_based_partner(K);
        } catch (const Error&) {
            continue;
        }
        if (!is_internally_stable(G, K).stable || !check_minimal(G).minimal) continue;
        ++made;
        double J = lqg_cost(G, K);
        TruncationResult bt = balanced_truncate_unstable(K, 3);
        TruncationResult mt = modal_truncate_stable(K, 1);
        auto ratio = [&](const StateSpace& Kr, int& bad) {
            if (!is_internally_stable(G, Kr).stable) {
                ++bad;
                return inf;
            }
            return lqg_cost(G, Kr) / J;
        };
        c.ratio_bt.push_back(ratio(bt.reduced, c.unstable_bt));
        c.ratio_mt.push_back(ratio(mt.reduced, c.unstable_mt));
        c.delta_bt.push_back(hinf_norm(bt.delta));
        c.delta_mt.push_back(hinf_norm(mt.delta));
    }
    c.iqr_bt = quantile(c.ratio_bt, 0.75) - quantile(c.ratio_bt, 0.25);
    c.iqr_mt = quantile(c.ratio_mt, 0.75) - quantile(c.ratio_mt, 0.25);
    return c;
}

inline json to_json(const Comparison& c) {
    json j;
    j["experiment"] = "bt-vs-mt";
    j["instance"] = "30 random order-4 controllers: stable minimal third-order part plus (0.2, 0.5, 0.5, 0)";
    auto arr = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(number(x));
        return a;
    };
    j["ratio_balanced"] = arr(c.ratio_bt);
    j["ratio_modal"] = arr(c.ratio_mt);
    j["delta_hinf_balanced"] = arr(c.delta_bt);
    j["delta_hinf_modal"] = arr(c.delta_mt);
    j["iqr_balanced"] = number(c.iqr_bt);
    j["iqr_modal"] = number(c.iqr_mt);
    j["non_stabilizing"] = {{"balanced", c.unstable_bt}, {"modal", c.unstable_mt}};
    return j;
}

}  // namespace ctred::experiments
