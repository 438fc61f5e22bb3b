// Python bindings for the main transport operations.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "causalot/document.hpp"
#include "causalot/dpp.hpp"
#include "causalot/ot1d.hpp"

namespace py = pybind11;
using namespace causalot;

namespace {

PathMeasure measure_from_pairs(const std::vector<std::pair<Path, double>>& atoms) {
    std::vector<WeightedPath> weighted;
    weighted.reserve(atoms.size());
    for (const auto& [path, weight] : atoms) weighted.push_back({path, weight});
    return PathMeasure::from_atoms(std::move(weighted));
}

TransportPlan plan_from_tuples(const std::vector<std::tuple<Path, Path, double>>& atoms) {
    std::vector<PlanAtom> plan_atoms;
    plan_atoms.reserve(atoms.size());
    for (const auto& [x, y, w] : atoms) plan_atoms.push_back({x, y, w});
    return TransportPlan::from_atoms(std::move(plan_atoms));
}

std::vector<std::tuple<Path, Path, double>> plan_to_tuples(const TransportPlan& plan) {
    std::vector<std::tuple<Path, Path, double>> out;
    out.reserve(plan.size());
    for (const auto& atom : plan.atoms()) out.emplace_back(atom.x, atom.y, atom.weight);
    return out;
}

CostSpec cost_from_name(const std::string& name, int stages) {
    if (name == "indicator_neq") return CostSpec::indicator_neq();
    if (name == "sq_euclidean_separable") return CostSpec::squared_separable(stages);
    if (name == "abs_separable") return CostSpec::abs_separable(stages);
    if (name == "increments_sq") return CostSpec::increments_squared(stages);
    raise(Errc::InvalidArgument, "unknown cost '" + name + "'");
}

Distribution1D distribution_from_pairs(const std::vector<std::pair<double, double>>& atoms) {
    return Distribution1D::from_atoms(std::vector<std::pair<double, double>>(atoms));
}

py::dict causality_report_to_dict(const CausalityReport& report) {
    py::dict out;
    out["ok"] = report.ok;
    out["worst_violation"] = report.worst_violation;
    if (report.witness) {
        py::dict witness;
        witness["stage"] = report.witness->stage;
        witness["x_history"] = report.witness->x_history;
        witness["y_history"] = report.witness->y_history;
        witness["successor"] = report.witness->successor;
        witness["reverse"] = report.witness->reverse;
        out["witness"] = witness;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "causal and bicausal optimal transport between discrete path measures";

    py::register_exception<Error>(m, "CausalotError");

    py::class_<PathMeasure>(m, "PathMeasure")
        .def(py::init(&measure_from_pairs), py::arg("atoms"),
             "Build from [(path, weight), ...]; duplicates merge, weights must sum to one.")
        .def_property_readonly("num_stages", &PathMeasure::num_stages)
        .def("atoms",
             [](const PathMeasure& self) {
                 std::vector<std::pair<Path, double>> out;
                 for (const auto& atom : self.atoms()) out.emplace_back(atom.path, atom.weight);
                 return out;
             })
        .def("mass_of", &PathMeasure::mass_of)
        .def("structure",
             [](const PathMeasure& self) {
                 const StructureFlags flags = structure_flags(self);
                 py::dict out;
                 out["is_markov"] = flags.is_markov;
                 out["is_product"] = flags.is_product;
                 out["has_independent_increments"] = flags.has_independent_increments;
                 return out;
             })
        .def("__len__", &PathMeasure::size)
        .def("__repr__", [](const PathMeasure& self) {
            return "PathMeasure(" + std::to_string(self.size()) + " atoms, " +
                   std::to_string(self.num_stages()) + " stages)";
        });

    m.def(
        "solve",
        [](const PathMeasure& mu, const PathMeasure& nu, const std::string& cost,
           const std::string& mode) {
            const Mode m_ = mode == "classical" ? Mode::Classical
                            : mode == "causal"  ? Mode::Causal
                                                : Mode::Bicausal;
            if (mode != "classical" && mode != "causal" && mode != "bicausal")
                raise(Errc::InvalidArgument, "mode must be classical, causal or bicausal");
            const Solution sol = solve(mu, nu, cost_from_name(cost, mu.num_stages()), m_);
            py::dict out;
            out["value"] = sol.value;
            out["plan"] = plan_to_tuples(sol.plan);
            out["mode"] = mode;
            if (m_ == Mode::Bicausal)
                out["max_reverse_multiplier"] =
                    reverse_multiplier_report(sol).max_abs_anticausal_multiplier;
            return out;
        },
        py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("mode"));

    m.def(
        "solve_table",
        [](const PathMeasure& mu, const PathMeasure& nu,
           const std::vector<std::vector<double>>& table, const std::string& mode) {
            const Mode m_ = mode == "classical" ? Mode::Classical
                            : mode == "causal"  ? Mode::Causal
                                                : Mode::Bicausal;
            if (table.size() != mu.size())
                raise(Errc::InvalidArgument, "table rows must match |mu|");
            auto map = std::make_shared<std::map<std::pair<Path, Path>, double>>();
            for (std::size_t i = 0; i < mu.size(); ++i) {
                if (table[i].size() != nu.size())
                    raise(Errc::InvalidArgument, "table columns must match |nu|");
                for (std::size_t j = 0; j < nu.size(); ++j)
                    (*map)[{mu.atoms()[i].path, nu.atoms()[j].path}] = table[i][j];
            }
            const CostSpec cost =
                CostSpec::general([map](std::span<const double> x, std::span<const double> y) {
                    return map->at({Path(x.begin(), x.end()), Path(y.begin(), y.end())});
                });
            const Solution sol = solve(mu, nu, cost, m_);
            py::dict out;
            out["value"] = sol.value;
            out["plan"] = plan_to_tuples(sol.plan);
            return out;
        },
        py::arg("mu"), py::arg("nu"), py::arg("table"), py::arg("mode"),
        "Solve with an explicit cost table over the sorted atoms of mu and nu.");

    m.def("is_causal",
          [](const std::vector<std::tuple<Path, Path, double>>& plan, const PathMeasure& mu,
             const PathMeasure& nu) {
              return causality_report_to_dict(is_causal(plan_from_tuples(plan), mu, nu));
          });
    m.def("is_bicausal",
          [](const std::vector<std::tuple<Path, Path, double>>& plan, const PathMeasure& mu,
             const PathMeasure& nu) {
              return causality_report_to_dict(is_bicausal(plan_from_tuples(plan), mu, nu));
          });
    m.def("is_itt", [](const std::vector<std::tuple<Path, Path, double>>& plan) {
        return is_itt(plan_from_tuples(plan));
    });
    m.def("monge_check", [](const std::vector<std::tuple<Path, Path, double>>& plan) {
        const MongeReport report = monge_check(plan_from_tuples(plan));
        py::dict out;
        out["adapted"] = report.adapted;
        out["map"] = report.map ? py::cast(*report.map) : py::none();
        return out;
    });

    m.def("kr_coupling", [](const PathMeasure& mu, const PathMeasure& nu) {
        return plan_to_tuples(kr_coupling(mu, nu));
    });
    m.def("increments_kr", [](const PathMeasure& mu, const PathMeasure& nu) {
        return plan_to_tuples(increments_kr(mu, nu));
    });
    m.def("kr_uniqueness_check",
          [](const PathMeasure& mu, const PathMeasure& nu,
             const std::vector<std::tuple<Path, Path, double>>& candidate) {
              return kr_uniqueness_check(mu, nu, plan_from_tuples(candidate));
          });
    m.def("kernel_order_consistent", &kernel_order_consistent);

    m.def(
        "bicausal_dpp",
        [](const PathMeasure& mu, const PathMeasure& nu, const std::string& cost) {
            const auto result = bicausal_dpp(mu, nu, cost_from_name(cost, mu.num_stages()));
            return py::make_tuple(result.value, plan_to_tuples(result.plan));
        },
        py::arg("mu"), py::arg("nu"), py::arg("cost"));
    m.def(
        "causal_dpp",
        [](const PathMeasure& mu, const PathMeasure& nu, const std::string& cost) {
            return causal_dpp(mu, nu, cost_from_name(cost, mu.num_stages()));
        },
        py::arg("mu"), py::arg("nu"), py::arg("cost"));
    m.def("cdf_dominance_check", &cdf_dominance_check);

    m.def("relative_entropy", &relative_entropy, py::arg("nu"), py::arg("mu"));
    m.def("entropy_chain", &entropy_chain, py::arg("nu"), py::arg("mu"));
    m.def("lip_constant", &lip_constant);
    m.def(
        "exp_constants",
        [](const PathMeasure& mu, const std::vector<double>& a) { return exp_constants(mu, a); },
        py::arg("mu"), py::arg("a"));

    m.def(
        "transport_info_report",
        [](const PathMeasure& mu, const PathMeasure& nu,
           const std::optional<std::vector<double>>& a) {
            const InequalityReport report = transport_info_report(mu, nu, a);
            py::dict out;
            out["w1_bc"] = report.w1_bc;
            out["entropy"] = report.entropy;
            out["a"] = report.constants.a;
            out["lambda"] = report.constants.lambda;
            out["lipschitz"] = report.constants.lipschitz;
            out["k"] = report.constants.k;
            out["bound"] = report.bound;
            out["slack"] = report.slack;
            out["holds"] = report.holds;
            return out;
        },
        py::arg("mu"), py::arg("nu"), py::arg("a") = std::nullopt);

    m.def("lex_interpolate", &lex_interpolate, py::arg("mu"), py::arg("nu"), py::arg("t"));
    m.def("speed_profile", &speed_profile, py::arg("mu"), py::arg("nu"), py::arg("p"),
          py::arg("grid"));

    m.def(
        "monotone_coupling",
        [](const std::vector<std::pair<double, double>>& p,
           const std::vector<std::pair<double, double>>& q) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& cell :
                 monotone_coupling(distribution_from_pairs(p), distribution_from_pairs(q)))
                out.emplace_back(cell.x, cell.y, cell.weight);
            return out;
        },
        py::arg("p"), py::arg("q"), "Quantile coupling of two [(value, weight), ...] laws.");
    m.def(
        "w1",
        [](const std::vector<std::pair<double, double>>& p,
           const std::vector<std::pair<double, double>>& q) {
            return w1(distribution_from_pairs(p), distribution_from_pairs(q));
        },
        py::arg("p"), py::arg("q"));
    m.def(
        "ot1d_cost",
        [](const std::vector<std::pair<double, double>>& p,
           const std::vector<std::pair<double, double>>& q, const std::function<double(double)>& c) {
            return ot1d_cost(distribution_from_pairs(p), distribution_from_pairs(q), c);
        },
        py::arg("p"), py::arg("q"), py::arg("cost"),
        "Optimal transport on the line for a convex function of the difference.");
}
