#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "causalot/cost.hpp"
#include "causalot/lp.hpp"
#include "causalot/measures.hpp"

namespace causalot {

struct PlanAtom {
    Path x;
    Path y;
    double weight = 0.0;
};

/// Finitely supported coupling of two path spaces; atoms sorted by (x, y)
/// and deduplicated exactly, weights positive and summing to one.
class TransportPlan {
  public:
    TransportPlan() = default;
    static TransportPlan from_atoms(std::vector<PlanAtom> atoms);

    int num_stages() const { return num_stages_; }
    const std::vector<PlanAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    PathMeasure x_marginal() const;
    PathMeasure y_marginal() const;

    /// Plan with x and y roles exchanged.
    TransportPlan swapped() const;

    double cost(const CostSpec& c) const;

  private:
    int num_stages_ = 0;
    std::vector<PlanAtom> atoms_;
};

enum class Mode { Classical, Causal, Bicausal };

const char* mode_name(Mode mode);

/// One linearized kernel-identity row
///   mu(g) * gamma[(g,a);(h,.)] = mu(g a) * gamma[(g,.);(h,.)]
/// identified by stage, the history pair and the successor value.
/// `reverse` marks rows obtained from the coordinate-swapped construction.
struct CausalityRowKey {
    int stage = 0;
    Path x_history;
    Path y_history;
    double successor = 0.0;
    bool reverse = false;
};

struct CausalityRow {
    CausalityRowKey key;
    std::vector<double> coefficients;  // over plan variables, row == 0
};

/// Equality rows enforcing causality of a plan supported on the product of
/// the atom sets of mu and nu (variable (i,j) at index i*|nu|+j). All-zero
/// rows and one redundant successor row per (stage, history-pair) group are
/// dropped.
std::vector<CausalityRow> causality_rows(const PathMeasure& mu, const PathMeasure& nu);

struct DualCertificate {
    std::vector<double> phi;  // one per mu-atom
    std::vector<double> psi;  // one per nu-atom
    std::vector<std::pair<CausalityRowKey, double>> causality_multipliers;
    std::vector<std::pair<CausalityRowKey, double>> anticausality_multipliers;

    double max_abs_anticausal() const;
};

struct Solution {
    Mode mode = Mode::Classical;
    double value = 0.0;
    TransportPlan plan;
    DualCertificate dual;

    // solver diagnostics
    int lp_iterations = 0;
    double feasibility_residual = 0.0;
    double complementarity_residual = 0.0;
    double duality_gap = 0.0;
};

/// Solves (P), (Pc) or (Pbc) as an LP over the full product of the atom
/// sets, with marginal rows plus (swapped) causality rows by mode.
Solution solve(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost, Mode mode);

struct CausalityWitness {
    int stage = 0;
    Path x_history;
    Path y_history;
    double successor = 0.0;
    bool reverse = false;
};

struct CausalityReport {
    bool ok = false;
    double worst_violation = 0.0;
    std::optional<CausalityWitness> witness;
};

/// Checks the one-step kernel identities on every positive-mass history pair
/// of the plan; violations are measured on the conditional weights.
/// Requires plan marginals to match mu and nu within 1e-9.
CausalityReport is_causal(const TransportPlan& plan, const PathMeasure& mu, const PathMeasure& nu);

/// is_causal on the plan and on its coordinate swap.
CausalityReport is_bicausal(const TransportPlan& plan, const PathMeasure& mu,
                            const PathMeasure& nu);

/// Rebuilds the plan from kernels conditioned on (x_t, y_1..y_t) only.
/// Requires a causal plan and Markov mu; for semiseparable costs the
/// projection preserves the transport cost.
TransportPlan quasi_markov_projection(const TransportPlan& plan, const PathMeasure& mu,
                                      const PathMeasure& nu);

struct MongeReport {
    /// present iff every x-path carries exactly one y-path
    std::optional<std::vector<std::pair<Path, Path>>> map;
    /// whether y_1..y_t is a function of x_1..x_t across atoms, for all t
    bool adapted = false;
};

MongeReport monge_check(const TransportPlan& plan);

struct ReverseMultiplierReport {
    double max_abs_anticausal_multiplier = 0.0;
};

/// Largest reverse-causality dual multiplier of a bicausal solution.
ReverseMultiplierReport reverse_multiplier_report(const Solution& solution);

}  // namespace causalot
