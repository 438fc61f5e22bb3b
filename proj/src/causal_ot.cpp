#include "causalot/causal_ot.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace causalot {

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Classical: return "classical";
        case Mode::Causal: return "causal";
        case Mode::Bicausal: return "bicausal";
    }
    return "?";
}

TransportPlan TransportPlan::from_atoms(std::vector<PlanAtom> atoms) {
    std::erase_if(atoms, [](const PlanAtom& a) { return a.weight == 0.0; });
    if (atoms.empty()) raise(Errc::EmptySupport, "plan without positive mass");
    const std::size_t n = atoms.front().x.size();
    double total = 0.0;
    for (const auto& a : atoms) {
        if (a.x.size() != n || a.y.size() != n) raise(Errc::RaggedPaths, "plan paths of mixed length");
        if (a.weight < 0.0) raise(Errc::InvalidArgument, "negative plan weight");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > tol::input)
        raise(Errc::UnnormalizedWeights, "plan weights sum to " + std::to_string(total));
    std::sort(atoms.begin(), atoms.end(), [](const PlanAtom& a, const PlanAtom& b) {
        if (PathLess{}(a.x, b.x)) return true;
        if (PathLess{}(b.x, a.x)) return false;
        return PathLess{}(a.y, b.y);
    });
    TransportPlan plan;
    plan.num_stages_ = static_cast<int>(n);
    for (auto& a : atoms) {
        if (!plan.atoms_.empty() && plan.atoms_.back().x == a.x && plan.atoms_.back().y == a.y)
            plan.atoms_.back().weight += a.weight;
        else
            plan.atoms_.push_back(std::move(a));
    }
    return plan;
}

PathMeasure TransportPlan::x_marginal() const {
    std::vector<WeightedPath> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({a.x, a.weight});
    return PathMeasure::from_atoms(std::move(atoms));
}

PathMeasure TransportPlan::y_marginal() const {
    std::vector<WeightedPath> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({a.y, a.weight});
    return PathMeasure::from_atoms(std::move(atoms));
}

TransportPlan TransportPlan::swapped() const {
    std::vector<PlanAtom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({a.y, a.x, a.weight});
    return from_atoms(std::move(atoms));
}

double TransportPlan::cost(const CostSpec& c) const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight * c.evaluate(a.x, a.y);
    return acc;
}

namespace {

bool starts_with(const Path& path, const Path& prefix) {
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (path[i] != prefix[i]) return false;
    return true;
}

/// Emits the kernel-identity rows for one causality direction. `transposed`
/// chooses the variable indexing: plan variables always live on
/// (mu-atom i, nu-atom j) pairs at index i*|nu|+j; when checking the reverse
/// direction the roles of the measures are swapped but the indexing is not.
void append_direction_rows(const PathMeasure& side, const PathMeasure& other, bool reverse,
                           std::size_t num_vars, std::vector<CausalityRow>& out) {
    const std::size_t n_other = other.size();
    const int stages = side.num_stages();
    for (int t = 1; t < stages; ++t) {
        const auto side_histories = side.histories(t);
        const auto other_histories = other.histories(t);
        for (const auto& g : side_histories) {
            const double mass_g = side.prefix_mass(g);
            const Distribution1D succ = side.conditional(g);
            if (succ.size() < 2) continue;  // single successor: rows are identically zero
            for (const auto& h : other_histories) {
                // first successor of the group dropped: rows in a group sum to zero
                for (std::size_t s = 1; s < succ.size(); ++s) {
                    const double a = succ.values()[s];
                    Path ga = g;
                    ga.push_back(a);
                    const double mass_ga = side.prefix_mass(ga);
                    CausalityRow row;
                    row.key = {t, reverse ? h : g, reverse ? g : h, a, reverse};
                    row.coefficients.assign(num_vars, 0.0);
                    bool nonzero = false;
                    for (std::size_t i = 0; i < side.size(); ++i) {
                        const Path& xs = side.atoms()[i].path;
                        if (!starts_with(xs, g)) continue;
                        const double coef = (xs[t] == a ? mass_g : 0.0) - mass_ga;
                        if (coef == 0.0) continue;
                        for (std::size_t j = 0; j < other.size(); ++j) {
                            if (!starts_with(other.atoms()[j].path, h)) continue;
                            const std::size_t idx = reverse ? j * side.size() + i : i * n_other + j;
                            row.coefficients[idx] = coef;
                            nonzero = true;
                        }
                    }
                    if (nonzero) out.push_back(std::move(row));
                }
            }
        }
    }
}

}  // namespace

std::vector<CausalityRow> causality_rows(const PathMeasure& mu, const PathMeasure& nu) {
    std::vector<CausalityRow> rows;
    append_direction_rows(mu, nu, false, mu.size() * nu.size(), rows);
    return rows;
}

double DualCertificate::max_abs_anticausal() const {
    double best = 0.0;
    for (const auto& [key, value] : anticausality_multipliers) best = std::max(best, std::abs(value));
    return best;
}

Solution solve(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost, Mode mode) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    const std::size_t nx = mu.size();
    const std::size_t ny = nu.size();
    const std::size_t num_vars = nx * ny;

    LinearProgram lp;
    lp.objective.resize(num_vars);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            lp.objective[i * ny + j] = cost.evaluate(mu.atoms()[i].path, nu.atoms()[j].path);

    // marginal rows
    for (std::size_t i = 0; i < nx; ++i) {
        std::vector<double> row(num_vars, 0.0);
        for (std::size_t j = 0; j < ny; ++j) row[i * ny + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(mu.atoms()[i].weight);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        std::vector<double> row(num_vars, 0.0);
        for (std::size_t i = 0; i < nx; ++i) row[i * ny + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(nu.atoms()[j].weight);
    }

    std::vector<CausalityRow> forward_rows;
    std::vector<CausalityRow> reverse_rows;
    if (mode == Mode::Causal || mode == Mode::Bicausal)
        append_direction_rows(mu, nu, false, num_vars, forward_rows);
    if (mode == Mode::Bicausal) append_direction_rows(nu, mu, true, num_vars, reverse_rows);

    for (const auto& row : forward_rows) {
        lp.rows.push_back(row.coefficients);
        lp.rhs.push_back(0.0);
    }
    for (const auto& row : reverse_rows) {
        lp.rows.push_back(row.coefficients);
        lp.rhs.push_back(0.0);
    }

    LpSolution lps = solve_lp(lp);
    if (lps.status != LpStatus::Optimal)
        raise(Errc::NumericalBreakdown,
              std::string("transport LP not optimal (mode ") + mode_name(mode) +
                  "); the independent coupling is always feasible");

    Solution sol;
    sol.mode = mode;
    sol.value = lps.objective;
    sol.lp_iterations = lps.iterations;
    sol.feasibility_residual = lps.feasibility_residual;
    sol.complementarity_residual = lps.complementarity_residual;
    sol.duality_gap = lps.duality_gap;

    std::vector<PlanAtom> atoms;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double w = lps.primal[i * ny + j];
            if (w > 1e-12) atoms.push_back({mu.atoms()[i].path, nu.atoms()[j].path, w});
        }
    sol.plan = TransportPlan::from_atoms(std::move(atoms));

    sol.dual.phi.assign(lps.dual.begin(), lps.dual.begin() + nx);
    sol.dual.psi.assign(lps.dual.begin() + nx, lps.dual.begin() + nx + ny);
    std::size_t offset = nx + ny;
    for (std::size_t r = 0; r < forward_rows.size(); ++r)
        sol.dual.causality_multipliers.emplace_back(forward_rows[r].key, lps.dual[offset + r]);
    offset += forward_rows.size();
    for (std::size_t r = 0; r < reverse_rows.size(); ++r)
        sol.dual.anticausality_multipliers.emplace_back(reverse_rows[r].key, lps.dual[offset + r]);
    return sol;
}

namespace {

void check_marginal(const PathMeasure& marginal, const PathMeasure& target, const char* which) {
    for (const auto& atom : marginal.atoms())
        if (std::abs(atom.weight - target.mass_of(atom.path)) > tol::input)
            raise(Errc::MarginalMismatch, std::string(which) + "-marginal deviates by more than 1e-9");
    for (const auto& atom : target.atoms())
        if (std::abs(atom.weight - marginal.mass_of(atom.path)) > tol::input)
            raise(Errc::MarginalMismatch, std::string(which) + "-marginal deviates by more than 1e-9");
}

/// Kernel-identity check in one direction, on conditional weights.
CausalityReport direction_report(const TransportPlan& plan, const PathMeasure& mu, bool reverse) {
    CausalityReport report;
    report.ok = true;
    const int stages = plan.num_stages();
    for (int t = 1; t < stages; ++t) {
        // group plan atoms by (x-history, y-history) of length t
        std::map<std::pair<Path, Path>, std::vector<const PlanAtom*>> groups;
        for (const auto& atom : plan.atoms()) {
            Path gx(atom.x.begin(), atom.x.begin() + t);
            Path gy(atom.y.begin(), atom.y.begin() + t);
            groups[{std::move(gx), std::move(gy)}].push_back(&atom);
        }
        for (const auto& [histories, members] : groups) {
            const auto& [gx, gy] = histories;
            double group_mass = 0.0;
            for (const auto* a : members) group_mass += a->weight;
            if (group_mass <= 0.0) continue;
            if (mu.prefix_mass(gx) <= 0.0) {
                // stray support outside mu (possible only below the marginal
                // tolerance): everything in the group is a violation
                if (group_mass > report.worst_violation) {
                    report.worst_violation = group_mass;
                    report.witness = CausalityWitness{t, gx, gy, members.front()->x[t], reverse};
                }
                continue;
            }
            const Distribution1D target = mu.conditional(gx);
            // successor masses of the plan within the group
            std::map<double, double> plan_succ;
            for (const auto* a : members) plan_succ[a->x[t]] += a->weight;
            std::vector<double> successors = target.values();
            for (const auto& [v, w] : plan_succ)
                if (std::find(successors.begin(), successors.end(), v) == successors.end())
                    successors.push_back(v);
            for (double a : successors) {
                double target_weight = 0.0;
                for (std::size_t k = 0; k < target.size(); ++k)
                    if (target.values()[k] == a) target_weight = target.weights()[k];
                const double plan_weight =
                    (plan_succ.count(a) ? plan_succ.at(a) : 0.0) / group_mass;
                const double violation = std::abs(plan_weight - target_weight);
                if (violation > report.worst_violation) {
                    report.worst_violation = violation;
                    report.witness = CausalityWitness{t, gx, gy, a, reverse};
                }
            }
        }
    }
    report.ok = report.worst_violation <= tol::input;
    return report;
}

}  // namespace

CausalityReport is_causal(const TransportPlan& plan, const PathMeasure& mu,
                          const PathMeasure& nu) {
    check_marginal(plan.x_marginal(), mu, "x");
    check_marginal(plan.y_marginal(), nu, "y");
    return direction_report(plan, mu, false);
}

CausalityReport is_bicausal(const TransportPlan& plan, const PathMeasure& mu,
                            const PathMeasure& nu) {
    CausalityReport forward = is_causal(plan, mu, nu);
    CausalityReport backward = direction_report(plan.swapped(), nu, true);
    CausalityReport merged;
    merged.ok = forward.ok && backward.ok;
    if (backward.worst_violation > forward.worst_violation) {
        merged.worst_violation = backward.worst_violation;
        merged.witness = backward.witness;
    } else {
        merged.worst_violation = forward.worst_violation;
        merged.witness = forward.witness;
    }
    return merged;
}

TransportPlan quasi_markov_projection(const TransportPlan& plan, const PathMeasure& mu,
                                      const PathMeasure& nu) {
    if (!is_causal(plan, mu, nu).ok) raise(Errc::NotCausal, "projection needs a causal plan");
    if (!structure_flags(mu).is_markov) raise(Errc::NotMarkov, "projection needs Markov mu");

    const int stages = plan.num_stages();
    struct Partial {
        Path x;
        Path y;
        double weight;
    };
    std::vector<Partial> partials;
    {
        std::map<std::pair<double, double>, double> first;
        for (const auto& atom : plan.atoms()) first[{atom.x[0], atom.y[0]}] += atom.weight;
        for (const auto& [pair, w] : first) partials.push_back({{pair.first}, {pair.second}, w});
    }
    for (int t = 1; t < stages; ++t) {
        std::vector<Partial> next;
        for (const auto& part : partials) {
            if (part.weight <= 0.0) continue;
            // kernel of the original plan given (x_t, y_1..y_t)
            const double x_last = part.x.back();
            std::map<std::pair<double, double>, double> step;
            double mass = 0.0;
            for (const auto& atom : plan.atoms()) {
                if (atom.x[t - 1] != x_last) continue;
                if (!std::equal(part.y.begin(), part.y.end(), atom.y.begin())) continue;
                step[{atom.x[t], atom.y[t]}] += atom.weight;
                mass += atom.weight;
            }
            for (const auto& [pair, w] : step) {
                Partial grown = part;
                grown.x.push_back(pair.first);
                grown.y.push_back(pair.second);
                grown.weight = part.weight * (w / mass);
                next.push_back(std::move(grown));
            }
        }
        partials = std::move(next);
    }
    std::vector<PlanAtom> atoms;
    atoms.reserve(partials.size());
    for (auto& part : partials) atoms.push_back({std::move(part.x), std::move(part.y), part.weight});
    return TransportPlan::from_atoms(std::move(atoms));
}

MongeReport monge_check(const TransportPlan& plan) {
    MongeReport report;
    std::map<Path, std::vector<const PlanAtom*>, PathLess> by_x;
    for (const auto& atom : plan.atoms()) by_x[atom.x].push_back(&atom);
    bool is_map = true;
    std::vector<std::pair<Path, Path>> mapping;
    for (const auto& [x, members] : by_x) {
        if (members.size() != 1) {
            is_map = false;
            break;
        }
        mapping.emplace_back(x, members.front()->y);
    }
    if (is_map) report.map = std::move(mapping);

    report.adapted = true;
    for (int t = 1; t <= plan.num_stages() && report.adapted; ++t) {
        std::map<Path, Path, PathLess> image;
        for (const auto& atom : plan.atoms()) {
            Path gx(atom.x.begin(), atom.x.begin() + t);
            Path gy(atom.y.begin(), atom.y.begin() + t);
            auto [it, inserted] = image.emplace(std::move(gx), gy);
            if (!inserted && it->second != gy) {
                report.adapted = false;
                break;
            }
        }
    }
    return report;
}

ReverseMultiplierReport reverse_multiplier_report(const Solution& solution) {
    if (solution.mode != Mode::Bicausal)
        raise(Errc::WrongMode, "reverse multipliers exist only in bicausal mode");
    return {solution.dual.max_abs_anticausal()};
}

}  // namespace causalot
