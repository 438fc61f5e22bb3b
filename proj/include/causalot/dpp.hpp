#pragma once

#include <map>
#include <utility>
#include <vector>

#include "causalot/causal_ot.hpp"

namespace causalot {

/// Backward recursion over history pairs: at each (x-history, y-history) a
/// classical one-step transport problem couples the conditional laws, with
/// the stage-(t+1) value table as continuation cost. Works for any cost;
/// the optimal plan is assembled by concatenating the per-history couplings.
struct BicausalDppResult {
    double value = 0.0;
    TransportPlan plan;
};

BicausalDppResult bicausal_dpp(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost);

/// Recursive causal value function for Markov mu and semiseparable costs.
///
/// Stage problems couple the mixture sum_a m(a) mu^{a} against the
/// conditional of nu; problems with a nonlinear continuation are solved by
/// Frank-Wolfe (transport LP as linear oracle, step 2/(k+2), duality gap
/// below 1e-6 or at most 10'000 iterations), with the continuation gradient
/// taken by forward differences of step 1e-6 on the kernel weights.
/// Terminal stage problems are plain transport LPs.
class CausalDpp {
  public:
    /// Checks Markov property, cost structure and the documented stage limit
    /// (N <= 3).
    CausalDpp(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost);

    /// V_0; equals the causal LP value.
    double value();

    /// Stage value V_t(y_1..y_t; m) for a nonnegative weight vector m on
    /// stage-t x-values, extended positively homogeneously in m.
    /// Exposed for the convexity diagnostics.
    double stage_value(int t, const Path& y_history, const std::map<double, double>& m);

    int frank_wolfe_iterations() const { return fw_iterations_; }

  private:
    struct StageProblem;
    double solve_stage(int t, const Path& y_history, const std::vector<double>& m,
                       const std::vector<double>& m_support);

    PathMeasure mu_;
    PathMeasure nu_;
    CostSpec cost_;
    std::vector<std::map<double, Distribution1D>> markov_kernels_;  // stage t -> (x_t value -> law of x_{t+1})
    // warm-start cache: per (stage, y-history) the last kernel argument and optimizer
    std::map<std::pair<int, Path>, std::pair<std::vector<double>, std::vector<double>>> warm_;
    int fw_iterations_ = 0;
};

/// Convenience wrapper returning V_0 directly.
double causal_dpp(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost);

/// Two-stage comparison of conditional CDFs: true iff for every grid point z
/// and every y-history the sign of F_{mu^{x1}}(z) - F_{nu^{y1}}(z) does not
/// depend on x1 (zeros are compatible with either sign).
bool cdf_dominance_check(const PathMeasure& mu, const PathMeasure& nu);

}  // namespace causalot
