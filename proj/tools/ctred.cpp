// Command-line front end: reduction, certification, norms, instance
// generation and the worked examples.

#include <iostream>

#include <CLI11.hpp>

#include <ctred/ctred.hpp>
#include <ctred/experiments.hpp>

using namespace ctred;

namespace {

enum Exit { Ok = 0, InputError = 2, Infeasible = 3, Numerical = 4 };

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::InfeasibleOrder:
    case ErrorKind::NotStabilizing:
    case ErrorKind::PartitionTie:
    case ErrorKind::ZeroMode: return Infeasible;
    case ErrorKind::Convergence:
    case ErrorKind::NearSingularSeparation:
    case ErrorKind::IllConditionedReordering:
    case ErrorKind::IllConditionedSplit:
    case ErrorKind::NoStabilizingSolution:
    case ErrorKind::Clustering: return Numerical;
    default: return InputError;
    }
}

int fail(const std::string& kind, const std::string& msg, int code) {
    json e = {{"error", kind}, {"message", msg}, {"exit_code", code}};
    std::cerr << e.dump() << '\n';
    return code;
}

struct Output {
    bool as_json = false;
    std::string path;  // empty: stdout

    void emit(const json& j, const std::string& text) const {
        std::string body = as_json ? j.dump(2) + "\n" : text;
        if (path.empty())
            std::cout << body;
        else
            write_text_file(path, j.dump(2) + "\n");
    }
};

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(10);
    o << v;
    return o.str();
}

StateSpace load(const std::string& path) { return read_system_file(path).system; }

void require_stabilizing(const StateSpace& G, const StateSpace& K) {
    auto st = is_internally_stable(G, K);
    if (!st.stable)
        throw Error(ErrorKind::NotStabilizing,
                    "controller does not stabilize the plant (closed-loop abscissa " + fmt(st.abscissa) + ")");
}

// ---- reduce -------------------------------------------------------------

struct ReduceArgs {
    std::string plant, controller, method = "balanced", scope = "all", out, report;
    long order = -1, blocks = -1;
    bool certify = false;
};

TruncationResult modal_with_scope(const StateSpace& K, Index r_red, bool stable_only) {
    return stable_only ? modal_truncate_stable(K, r_red) : modal_truncate(K, r_red);
}

// Modal truncation to a target order: the smallest number of removed blocks
// that lands exactly on it.
TruncationResult modal_to_order(const StateSpace& K, Index order, bool stable_only) {
    std::size_t k = stable_only ? modal_form(split_stable_unstable(K).stable).blocks.size() : modal_form(K).blocks.size();
    for (Index r_red = 1; r_red < static_cast<Index>(k); ++r_red) {
        TruncationResult t = modal_with_scope(K, r_red, stable_only);
        if (t.reduced.order() == order) return t;
        if (t.reduced.order() < order) break;
    }
    throw Error(ErrorKind::InfeasibleOrder,
                "no set of modal blocks gives order " + std::to_string(order) + "; use --blocks");
}

ReductionCertificate matching_certificate(const StateSpace& G, const StateSpace& K, const TruncationResult& t) {
    if (t.method == Method::Balanced) return check_cor1(G, K, t);
    if (is_stable_transfer(t.delta)) return check_cor2(G, K, t.reduced, t.delta);
    if (G.siso() && K.siso()) return check_thm3(G, K, t.reduced, t.delta);
    return check_thm1(G, K, t.reduced, t.delta);
}

int cmd_reduce(const ReduceArgs& a, const Output& out) {
    StateSpace G = load(a.plant), K = load(a.controller);
    require_stabilizing(G, K);
    TruncationResult t;
    bool stable_only = a.scope == "stable";
    if (a.method == "balanced") {
        if (a.blocks >= 0) throw Error(ErrorKind::Unsupported, "--blocks applies to modal truncation only");
        if (a.order < 0) throw Error(ErrorKind::OutOfRange, "balanced truncation needs --order");
        t = balanced_truncate_unstable(K, a.order);
    } else {
        if ((a.order < 0) == (a.blocks < 0)) throw Error(ErrorKind::OutOfRange, "modal truncation needs exactly one of --order, --blocks");
        t = a.blocks >= 0 ? modal_with_scope(K, a.blocks, stable_only) : modal_to_order(K, a.order, stable_only);
    }
    write_system_file(a.out, t.reduced, "reduced controller");
    json j;
    j["method"] = to_string(t.method);
    j["order"] = t.reduced.order();
    j["reduced_file"] = a.out;
    j["delta_stable"] = is_stable_transfer(t.delta);
    if (j["delta_stable"].get<bool>()) {
        auto dn = delta_norms(t.delta);
        j["delta_hinf"] = number(dn.hinf);
    }
    auto st = is_internally_stable(G, t.reduced);
    j["reduced_stabilizing"] = st.stable;
    j["J_K"] = lqg_cost(G, K);
    j["J_Kr"] = st.stable ? number(lqg_cost(G, t.reduced)) : json("inf");
    if (!t.removed_tail.empty()) {
        json tail = json::array();
        for (double s : t.removed_tail) tail.push_back(s);
        j["removed_hankel_values"] = tail;
    }
    std::string text = "reduced to order " + std::to_string(t.reduced.order()) + " (" + to_string(t.method) +
                       "), written to " + a.out + "\n";
    if (j.contains("delta_hinf")) text += "||Delta||_Hinf = " + fmt(j["delta_hinf"].get<double>()) + "\n";
    text += std::string("reduced controller stabilizes: ") + (st.stable ? "yes" : "no") + "\n";
    if (a.certify) {
        ReductionCertificate c = matching_certificate(G, K, t);
        json report;
        report["instance"] = {{"plant", a.plant}, {"controller", a.controller}, {"method", to_string(t.method)},
                              {"order", t.reduced.order()}};
        report["certificates"] = {certificate_to_json(c)};
        report["costs"] = {{"J_K", j["J_K"]}, {"J_Kr", j["J_Kr"]}};
        report["norms"] = {{"delta_hinf", j.contains("delta_hinf") ? j["delta_hinf"] : json("inf")}};
        if (c.cost_bound && st.stable)
            report["checks"] = {{"cost_within_bound", lqg_cost(G, t.reduced) <= *c.cost_bound}};
        std::string rp = a.report.empty() ? a.out + ".report.json" : a.report;
        write_text_file(rp, report.dump(2) + "\n");
        j["certificate"] = certificate_to_json(c);
        j["report_file"] = rp;
        text += std::string(to_string(c.theorem)) + " condition: " + (c.condition_satisfied ? "satisfied" : "not satisfied");
        if (!c.reason.empty()) text += " (" + c.reason + ")";
        text += "\n";
        if (c.cost_bound) text += "cost bound: " + fmt(*c.cost_bound) + "\n";
    }
    out.emit(j, text);
    return Ok;
}

// ---- cost ---------------------------------------------------------------

int cmd_cost(const std::string& plant, const std::string& controller, const Output& out) {
    StateSpace G = load(plant), K = load(controller);
    LqgCost c = lqg_cost_blocks(G, K);
    json j = {{"J", c.total}, {"blocks_h2_squared", {{"X", c.X}, {"XK", c.XK}, {"KX", c.KX}, {"KY", c.KY}}}};
    std::string text = "J = " + fmt(c.total) + "\n  ||X||^2 = " + fmt(c.X) + "\n  ||XK||^2 = " + fmt(c.XK) +
                       "\n  ||KX||^2 = " + fmt(c.KX) + "\n  ||KY||^2 = " + fmt(c.KY) + "\n";
    out.emit(j, text);
    return Ok;
}

// ---- norms --------------------------------------------------------------

int cmd_norms(const std::string& file, const std::string& which, const Output& out) {
    StateSpace S = load(file);
    double v = 0;
    if (which == "h2") {
        v = h2_norm(S);
    } else if (which == "hinf") {
        if (!is_hurwitz(S.A))
            throw Error(ErrorKind::StabilityPrecondition, "system is not stable; use linf for the peak gain");
        v = hinf_norm(S);
    } else if (which == "l2") {
        v = l2_norm(S);
    } else {
        v = linf_norm(S);
    }
    out.emit(json{{"norm", which}, {"value", number(v)}}, fmt(v) + "\n");
    return Ok;
}

// ---- gen ----------------------------------------------------------------

int cmd_gen(long order, long unstable, std::uint64_t seed, long m, long p, const std::string& prefix, const Output& out) {
    Instance inst = generate_instance(order, unstable, seed, m, p);
    std::string gp = prefix + "_plant.json", kp = prefix + "_controller.json";
    write_system_file(gp, inst.G, "plant seed " + std::to_string(seed));
    write_system_file(kp, inst.K, "controller seed " + std::to_string(seed));
    out.emit(json{{"plant", gp}, {"controller", kp}, {"seed", seed}}, "wrote " + gp + " and " + kp + "\n");
    return Ok;
}

// ---- certify ------------------------------------------------------------

int cmd_certify(const std::string& plant, const std::string& controller, const std::string& reduced,
                const std::string& theorem, const Output& out) {
    StateSpace G = load(plant), K = load(controller), Kr = load(reduced);
    require_stabilizing(G, K);
    ReductionCertificate c;
    if (theorem == "lemma3")
        c = check_lemma3(G, K, Kr);
    else if (theorem == "thm1")
        c = check_thm1(G, K, Kr);
    else if (theorem == "thm2")
        c = check_thm2_bound(G, K, Kr);
    else if (theorem == "cor2")
        c = check_cor2(G, K, Kr);
    else if (theorem == "thm3")
        c = check_thm3(G, K, Kr);
    else
        throw Error(ErrorKind::Unsupported,
                    "cor1 needs the Hankel values of the truncation; run reduce --method balanced --certify");
    json j = certificate_to_json(c);
    std::string text = std::string(to_string(c.theorem)) + ": " +
                       (c.condition_satisfied ? "condition satisfied" : "condition not satisfied") +
                       (c.reason.empty() ? "" : " (" + c.reason + ")") + "\n";
    if (c.cost_bound) text += "cost bound: " + fmt(*c.cost_bound) + "\n";
    text += std::string("closed loop with reduced controller stable: ") + (c.verified_stable ? "yes" : "no") + "\n";
    out.emit(j, text);
    return Ok;
}

// ---- repro --------------------------------------------------------------

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

int cmd_repro(const std::string& which, const std::string& csv, const Output& out) {
    json j;
    std::ostringstream text;
    text.precision(6);
    if (which == "table1") {
        auto t = experiments::table1();
        j = experiments::to_json(t);
        j["checks"] = {{"J_K", within(t.J_K, 8.0552, 0.01)},
                       {"J_balanced", within(t.J_bt, 8.0552, 0.01)},
                       {"J_modal", within(t.J_mt, 8.9928, 0.01)},
                       {"delta_modal_hinf", within(t.delta_mt_hinf, 0.0580, 0.05)},
                       {"delta_balanced_hinf", t.delta_bt_hinf <= 1e-5}};
        text << "J(K) = " << t.J_K << "\nJ(K_r) balanced = " << t.J_bt << "\nJ(K_r) modal = " << t.J_mt
             << "\n||Delta|| balanced = " << t.delta_bt_hinf << "\n||Delta|| modal = " << t.delta_mt_hinf << "\n";
    } else if (which == "unstable") {
        auto u = experiments::unstable();
        j = experiments::to_json(u);
        j["checks"] = {{"J_K", within(u.J_K, 343.2, 0.05)},
                       {"J_Kr", within(u.J_Kr, 58.2, 0.05)},
                       {"Kr_stabilizing", u.Kr_stabilizing},
                       {"Kr_cheaper", u.J_Kr < u.J_K},
                       {"thm3_satisfied", u.thm3.condition_satisfied}};
        text << "J(K) = " << u.J_K << "\nJ(K_r) = " << u.J_Kr
             << "\nK_r stabilizing: " << (u.Kr_stabilizing ? "yes" : "no")
             << "\nthm3 condition: " << (u.thm3.condition_satisfied ? "satisfied" : "not satisfied") << "\n";
    } else if (which == "scaling") {
        auto s = experiments::scaling();
        j = experiments::to_json(s);
        j["checks"] = {{"linear_fit_r2", s.r2 >= 0.95}};
        if (!csv.empty()) write_text_file(csv, experiments::scaling_csv(s));
        text << "slope = " << s.slope << "\nR^2 = " << s.r2 << "\n";
    } else {
        auto c = experiments::bt_vs_mt();
        j = experiments::to_json(c);
        j["checks"] = {{"iqr_balanced_below_modal", c.iqr_bt < c.iqr_mt}};
        text << "IQR balanced = " << c.iqr_bt << "\nIQR modal = " << c.iqr_mt << "\n";
    }
    out.emit(j, text.str());
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-order controller toolkit"};
    app.require_subcommand(1);
    Output out;
    app.add_flag("--json", out.as_json, "Print JSON instead of text");

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "Reduce a controller");
    reduce->add_option("plant", ra.plant)->required()->check(CLI::ExistingFile);
    reduce->add_option("controller", ra.controller)->required()->check(CLI::ExistingFile);
    reduce->add_option("--method", ra.method)->check(CLI::IsMember({"balanced", "modal"}));
    reduce->add_option("--order", ra.order, "Target order");
    reduce->add_option("--blocks", ra.blocks, "Number of modal blocks to remove");
    reduce->add_option("--scope", ra.scope, "Modal truncation over all modes or the stable part only")
        ->check(CLI::IsMember({"all", "stable"}));
    reduce->add_option("--out", ra.out)->required();
    reduce->add_flag("--certify", ra.certify, "Also write a report with the matching certificate");
    reduce->add_option("--report", ra.report, "Report path (default <out>.report.json)");

    std::string plant, controller, reduced, file, which, theorem, csv, prefix;
    auto* cost = app.add_subcommand("cost", "LQG cost of a plant-controller pair");
    cost->add_option("plant", plant)->required()->check(CLI::ExistingFile);
    cost->add_option("controller", controller)->required()->check(CLI::ExistingFile);

    auto* norms = app.add_subcommand("norms", "System norms");
    norms->add_option("file", file)->required()->check(CLI::ExistingFile);
    norms->add_option("which", which)->required()->check(CLI::IsMember({"h2", "hinf", "l2", "linf"}));

    long order = 0, unstable = 0, m = 1, p = 1;
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen", "Random controller and a plant it stabilizes");
    gen->add_option("--order", order)->required();
    gen->add_option("--unstable", unstable);
    gen->add_option("--seed", seed)->required();
    gen->add_option("--inputs", m, "Plant inputs");
    gen->add_option("--outputs", p, "Plant outputs");
    gen->add_option("--out", prefix)->required();

    auto* repro = app.add_subcommand("repro", "Worked examples");
    repro->add_option("which", which)->required()->check(CLI::IsMember({"table1", "unstable", "scaling", "bt-vs-mt"}));
    repro->add_option("--csv", csv, "CSV side file (scaling)");

    auto* cert = app.add_subcommand("certify", "Evaluate one certificate for a given reduced controller");
    cert->add_option("plant", plant)->required()->check(CLI::ExistingFile);
    cert->add_option("controller", controller)->required()->check(CLI::ExistingFile);
    cert->add_option("reduced", reduced)->required()->check(CLI::ExistingFile);
    cert->add_option("--theorem", theorem)->required()->check(
        CLI::IsMember({"lemma3", "thm1", "thm2", "cor1", "cor2", "thm3"}));

    for (auto* sc : {cost, norms, repro, cert}) sc->add_option("--out", out.path, "Write JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), InputError);
    }

    try {
        if (*reduce) return cmd_reduce(ra, out);
        if (*cost) return cmd_cost(plant, controller, out);
        if (*norms) return cmd_norms(file, which, out);
        if (*gen) return cmd_gen(order, unstable, seed, m, p, prefix, out);
        if (*repro) return cmd_repro(which, csv, out);
        if (*cert) return cmd_certify(plant, controller, reduced, theorem, out);
    } catch (const Error& e) {
        return fail(to_string(e.kind()), e.what(), exit_code(e.kind()));
    } catch (const std::exception& e) {
        return fail("internal", e.what(), Numerical);
    }
    return Ok;
}
