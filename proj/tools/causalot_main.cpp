// Command-line front end: load instance documents, run the transport
// solvers and checks, and emit human- or machine-readable reports.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causalot/document.hpp"
#include "causalot/dpp.hpp"
#include "json.hpp"

namespace {

using namespace causalot;
using nlohmann::json;

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariant = 4;

struct Options {
    std::string input;
    std::string mode = "causal";
    std::string cost;
    std::vector<double> ts;
    double p = 1.0;
    std::vector<double> a;
    bool as_json = false;
    double report_tol = 1e-9;
    bool increments = false;
};

json plan_to_json(const TransportPlan& plan) {
    json atoms = json::array();
    for (const auto& atom : plan.atoms()) atoms.push_back({atom.x, atom.y, atom.weight});
    return atoms;
}

json measure_to_json(const PathMeasure& m) {
    json atoms = json::array();
    for (const auto& atom : m.atoms()) atoms.push_back({atom.path, atom.weight});
    return atoms;
}

void emit(const Options& opt, const json& report) {
    if (opt.as_json) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    // flat human-readable key: value lines
    std::function<void(const std::string&, const json&)> walk =
        [&](const std::string& prefix, const json& node) {
            if (node.is_object()) {
                for (const auto& [key, value] : node.items())
                    walk(prefix.empty() ? key : prefix + "." + key, value);
            } else {
                std::cout << prefix << " = " << node.dump() << "\n";
            }
        };
    walk("", report);
}

Mode parse_mode(const std::string& mode) {
    if (mode == "classical") return Mode::Classical;
    if (mode == "causal") return Mode::Causal;
    if (mode == "bicausal") return Mode::Bicausal;
    raise(Errc::ParseError, "mode must be classical, causal or bicausal");
}

CostSpec resolve_cost(const Options& opt, const Document& doc, const PathMeasure& mu,
                      const PathMeasure& nu) {
    if (!opt.cost.empty()) {
        const int n = mu.num_stages();
        if (opt.cost == "indicator_neq") return CostSpec::indicator_neq();
        if (opt.cost == "sq_euclidean_separable") return CostSpec::squared_separable(n);
        if (opt.cost == "abs_separable") return CostSpec::abs_separable(n);
        if (opt.cost == "increments_sq") return CostSpec::increments_squared(n);
        // otherwise a path to a document holding only a cost
        return Document::load_file(opt.cost).cost(mu, nu);
    }
    if (doc.has_cost()) return doc.cost(mu, nu);
    raise(Errc::ParseError, "no cost: provide one in the document or via --cost");
}

json causality_report_json(const CausalityReport& report, double tol) {
    json out{{"ok", report.ok}, {"worst_violation", report.worst_violation}, {"tolerance", tol}};
    if (report.witness) {
        out["witness"] = {{"stage", report.witness->stage},
                          {"x_history", report.witness->x_history},
                          {"y_history", report.witness->y_history},
                          {"successor", report.witness->successor},
                          {"reverse", report.witness->reverse}};
    }
    return out;
}

int cmd_solve(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    const CostSpec cost = resolve_cost(opt, doc, mu, nu);
    const Mode mode = parse_mode(opt.mode);
    const Solution sol = solve(mu, nu, cost, mode);

    json report;
    report["mode"] = mode_name(mode);
    report["value"] = sol.value;
    report["plan"] = plan_to_json(sol.plan);
    report["lp"] = {{"iterations", sol.lp_iterations},
                    {"feasibility_residual", sol.feasibility_residual},
                    {"complementarity_residual", sol.complementarity_residual},
                    {"duality_gap", sol.duality_gap},
                    {"tolerance", opt.report_tol}};
    double dual_value = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) dual_value += sol.dual.phi[i] * mu.atoms()[i].weight;
    for (std::size_t j = 0; j < nu.size(); ++j) dual_value += sol.dual.psi[j] * nu.atoms()[j].weight;
    report["dual"] = {{"phi_mu_plus_psi_nu", dual_value},
                      {"matches_value", std::abs(dual_value - sol.value) <= opt.report_tol},
                      {"tolerance", opt.report_tol}};
    if (mode == Mode::Bicausal)
        report["dual"]["max_reverse_multiplier"] =
            reverse_multiplier_report(sol).max_abs_anticausal_multiplier;
    if (mode == Mode::Causal || mode == Mode::Bicausal) {
        const CausalityReport check = mode == Mode::Causal ? is_causal(sol.plan, mu, nu)
                                                           : is_bicausal(sol.plan, mu, nu);
        report["verification"] = causality_report_json(check, opt.report_tol);
        if (!check.ok) {
            emit(opt, report);
            return kExitSolver;
        }
    }
    emit(opt, report);
    return 0;
}

int cmd_kr(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    const TransportPlan plan = opt.increments ? increments_kr(mu, nu) : kr_coupling(mu, nu);

    json report;
    report["variant"] = opt.increments ? "increments" : "plain";
    report["plan"] = plan_to_json(plan);
    report["bicausal"] = causality_report_json(is_bicausal(plan, mu, nu), opt.report_tol);
    report["increasing_triangular"] = is_itt(plan);
    if (doc.has_cost() || !opt.cost.empty())
        report["cost"] = plan.cost(resolve_cost(opt, doc, mu, nu));
    emit(opt, report);
    return report["bicausal"]["ok"].get<bool>() && report["increasing_triangular"].get<bool>()
               ? 0
               : kExitInvariant;
}

int cmd_nested(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    const CostSpec cost = resolve_cost(opt, doc, mu, nu);

    json report;
    const Solution lp_bicausal = solve(mu, nu, cost, Mode::Bicausal);
    const auto recursion = bicausal_dpp(mu, nu, cost);
    report["bicausal"] = {{"lp_value", lp_bicausal.value},
                          {"recursion_value", recursion.value},
                          {"difference", std::abs(lp_bicausal.value - recursion.value)},
                          {"tolerance", 1e-8}};
    const Solution lp_causal = solve(mu, nu, cost, Mode::Causal);
    report["causal"] = {{"lp_value", lp_causal.value}};
    if (cost.is_semiseparable() && mu.num_stages() <= 3 && structure_flags(mu).is_markov) {
        const double recursion_causal = causal_dpp(mu, nu, cost);
        report["causal"]["recursion_value"] = recursion_causal;
        report["causal"]["difference"] = std::abs(lp_causal.value - recursion_causal);
        report["causal"]["tolerance"] = 1e-5;
    }
    emit(opt, report);
    const bool ok = std::abs(lp_bicausal.value - recursion.value) <= 1e-8;
    return ok ? 0 : kExitInvariant;
}

int cmd_inequality(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    const auto a = opt.a.empty() ? std::nullopt : std::optional<std::vector<double>>(opt.a);
    const InequalityReport report = transport_info_report(mu, nu, a);
    json out{{"w1_bicausal", report.w1_bc},
             {"entropy", std::isinf(report.entropy) ? json("inf") : json(report.entropy)},
             {"constants",
              {{"a", report.constants.a},
               {"lambda", report.constants.lambda},
               {"lipschitz", report.constants.lipschitz},
               {"k", report.constants.k}}},
             {"bound", std::isinf(report.bound) ? json("inf") : json(report.bound)},
             {"slack", std::isinf(report.slack) ? json("inf") : json(report.slack)},
             {"holds", report.holds},
             {"tolerance", opt.report_tol}};
    emit(opt, out);
    return report.holds ? 0 : kExitInvariant;
}

int cmd_interpolate(const Options& opt) {
    if (opt.ts.empty()) raise(Errc::ParseError, "interpolate needs --t with at least one value");
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    json report;
    report["t"] = opt.ts;
    json measures = json::array();
    for (double t : opt.ts) measures.push_back(measure_to_json(lex_interpolate(mu, nu, t)));
    report["measures"] = measures;
    if (opt.p >= 1.0 && structure_flags(mu).is_product) {
        report["speed"] = {{"p", opt.p},
                           {"values", speed_profile(mu, nu, opt.p, opt.ts)},
                           {"tolerance", 1e-7}};
    }
    emit(opt, report);
    return 0;
}

int cmd_program(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    if (!doc.has_program()) raise(Errc::ParseError, "document has no program block");
    const StagewiseProgram prog = doc.program();
    const PathMeasure mu = doc.measure("mu");
    json report;
    const ProgramValue value = eval_program(mu, prog);
    report["value_mu"] = value.value;
    json controls = json::array();
    for (const auto& [node, u] : value.controls) controls.push_back({node, u});
    report["controls_mu"] = controls;
    if (doc.has_measure("nu")) {
        const PathMeasure nu = doc.measure("nu");
        const DiscrepancyReport disc = discrepancy_bound_check(mu, nu, prog);
        report["value_nu"] = eval_program(nu, prog).value;
        report["discrepancy"] = {{"lhs", disc.lhs},
                                 {"w1_bicausal", disc.w1_bicausal},
                                 {"rhs", disc.rhs},
                                 {"entropy_rhs",
                                  std::isinf(disc.entropy_rhs) ? json("inf") : json(disc.entropy_rhs)},
                                 {"ok", disc.ok},
                                 {"tolerance", opt.report_tol}};
        emit(opt, report);
        return disc.ok ? 0 : kExitInvariant;
    }
    emit(opt, report);
    return 0;
}

int cmd_validate(const Options& opt) {
    const Document doc = Document::load_file(opt.input);
    const PathMeasure mu = doc.measure("mu");
    const PathMeasure nu = doc.measure("nu");
    json checks = json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, bool ok, double measured, double tol) {
        checks.push_back({{"check", name}, {"ok", ok}, {"measured", measured}, {"tolerance", tol}});
        all_ok = all_ok && ok;
    };

    // disintegration recomposition
    double worst_recomposition = 0.0;
    for (int t = 1; t < mu.num_stages(); ++t) {
        const auto [prefix, kernel] = disintegrate(mu, t);
        const PathMeasure target = mu.prefix_marginal(t + 1);
        for (const auto& atom : target.atoms()) {
            const Path history(atom.path.begin(), atom.path.end() - 1);
            const Distribution1D& cond = kernel.at(history);
            double kernel_weight = 0.0;
            for (std::size_t i = 0; i < cond.size(); ++i)
                if (cond.values()[i] == atom.path.back()) kernel_weight = cond.weights()[i];
            worst_recomposition = std::max(
                worst_recomposition,
                std::abs(prefix.mass_of(history) * kernel_weight - atom.weight));
        }
    }
    record("disintegration_recomposition", worst_recomposition < 1e-12, worst_recomposition, 1e-12);

    // independent coupling is bicausal
    {
        std::vector<PlanAtom> atoms;
        for (const auto& x : mu.atoms())
            for (const auto& y : nu.atoms()) atoms.push_back({x.path, y.path, x.weight * y.weight});
        const CausalityReport indep = is_bicausal(TransportPlan::from_atoms(std::move(atoms)), mu, nu);
        record("independent_coupling_bicausal", indep.ok, indep.worst_violation, 1e-9);
    }

    // mode ordering and self checks
    const CostSpec cost =
        doc.has_cost() || !opt.cost.empty() ? resolve_cost(opt, doc, mu, nu)
                                            : CostSpec::abs_separable(mu.num_stages());
    const Solution classical = solve(mu, nu, cost, Mode::Classical);
    const Solution causal = solve(mu, nu, cost, Mode::Causal);
    const Solution bicausal = solve(mu, nu, cost, Mode::Bicausal);
    record("value_ordering_classical_causal", classical.value <= causal.value + 1e-9,
           causal.value - classical.value, 1e-9);
    record("value_ordering_causal_bicausal", causal.value <= bicausal.value + 1e-9,
           bicausal.value - causal.value, 1e-9);
    record("causal_plan_verified", is_causal(causal.plan, mu, nu).ok,
           is_causal(causal.plan, mu, nu).worst_violation, 1e-9);
    record("bicausal_plan_verified", is_bicausal(bicausal.plan, mu, nu).ok,
           is_bicausal(bicausal.plan, mu, nu).worst_violation, 1e-9);
    for (const Solution* sol : {&classical, &causal, &bicausal}) {
        double dual_value = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            dual_value += sol->dual.phi[i] * mu.atoms()[i].weight;
        for (std::size_t j = 0; j < nu.size(); ++j)
            dual_value += sol->dual.psi[j] * nu.atoms()[j].weight;
        record(std::string("strong_duality_") + mode_name(sol->mode),
               std::abs(dual_value - sol->value) <= 1e-9, std::abs(dual_value - sol->value), 1e-9);
    }

    // rearrangement structure
    const TransportPlan kr = kr_coupling(mu, nu);
    record("kr_bicausal", is_bicausal(kr, mu, nu).ok, is_bicausal(kr, mu, nu).worst_violation, 1e-9);
    record("kr_increasing_triangular", is_itt(kr), is_itt(kr) ? 0.0 : 1.0, 0.0);

    // recursion agreement
    const auto recursion = bicausal_dpp(mu, nu, cost);
    record("bicausal_recursion_matches_lp", std::abs(recursion.value - bicausal.value) <= 1e-8,
           std::abs(recursion.value - bicausal.value), 1e-8);

    // entropy chain when absolutely continuous
    bool dominated = true;
    for (const auto& atom : nu.atoms()) dominated = dominated && mu.mass_of(atom.path) > 0.0;
    if (dominated) {
        double acc = 0.0;
        for (double term : entropy_chain(nu, mu)) acc += term;
        const double total = relative_entropy(nu, mu);
        record("entropy_chain_rule", std::abs(acc - total) <= 1e-10, std::abs(acc - total), 1e-10);
        const InequalityReport info = transport_info_report(mu, nu);
        record("transport_information_inequality", info.holds, info.slack, 1e-9);
    }

    json report;
    report["checks"] = checks;
    report["ok"] = all_ok;
    emit(opt, report);
    return all_ok ? 0 : kExitInvariant;
}

int dispatch(const std::string& command, const Options& opt) {
    if (command == "solve") return cmd_solve(opt);
    if (command == "kr") return cmd_kr(opt);
    if (command == "nested") return cmd_nested(opt);
    if (command == "inequality") return cmd_inequality(opt);
    if (command == "interpolate") return cmd_interpolate(opt);
    if (command == "program") return cmd_program(opt);
    if (command == "validate") return cmd_validate(opt);
    raise(Errc::ParseError, "unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal and bicausal optimal transport between finitely supported path measures"};
    app.require_subcommand(1);
    Options opt;

    std::vector<CLI::App*> subs;
    for (const char* name : {"solve", "kr", "nested", "inequality", "interpolate", "program",
                             "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("input", opt.input, "instance document")->required();
        sub->add_option("--cost", opt.cost, "builtin cost name or cost document path");
        sub->add_option("--tol", opt.report_tol, "tolerance quoted in reports");
        sub->add_flag("--json", opt.as_json, "machine-readable output");
        subs.push_back(sub);
    }
    app.get_subcommand("solve")->add_option("--mode", opt.mode,
                                            "classical, causal or bicausal");
    app.get_subcommand("kr")->add_flag("--increments", opt.increments,
                                       "rearrange in increment coordinates");
    app.get_subcommand("interpolate")->add_option("--t", opt.ts, "interpolation parameters");
    app.get_subcommand("interpolate")->add_option("--p", opt.p, "cost exponent");
    app.get_subcommand("inequality")->add_option("--a", opt.a, "per-stage exponential scales");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitParse;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), opt);
    } catch (const causalot::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case Errc::NumericalBreakdown:
            case Errc::NonConvergence:
                return kExitSolver;
            default:
                return kExitParse;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
