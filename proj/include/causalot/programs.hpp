#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "causalot/causal_ot.hpp"
#include "causalot/knothe.hpp"

namespace causalot {

struct ControlGrid {
    std::vector<double> points;
};

struct ControlInterval {
    double lo = 0.0;  // may be -infinity
    double hi = 0.0;  // may be +infinity
};

/// One stage of a stagewise-decomposable program: an objective term
/// H_t(x_1..x_t, u_t) and the admissible control set for u_t.
struct ProgramStage {
    std::function<double(std::span<const double>, double)> objective;
    std::variant<ControlGrid, ControlInterval> control;
    bool convex_in_u = false;  // declared, enables golden-section refinement
};

/// H = sum_t H_t(x_1..x_t, u_t), with declared regularity used by the
/// bound checks: `lipschitz_r` bounds sum_t |H_t(x..) - H_t(x'..)| by
/// r * ||x - x'||_1 uniformly in the controls.
struct StagewiseProgram {
    std::vector<ProgramStage> stages;
    double lipschitz_r = 0.0;
    bool concave_in_x = false;  // declared, for the interpolation diagnostics

    int num_stages() const { return static_cast<int>(stages.size()); }
};

struct ProgramValue {
    double value = 0.0;
    std::vector<std::pair<Path, double>> controls;  // optimal u per prefix node
};

/// Adapted minimization node by node on the prefix tree of eta: the control
/// at a stage-t node sees x_1..x_t, so each node minimizes its own term.
/// Interval controls use a coarse scan plus golden-section refinement
/// (tolerance 1e-8) when convexity in u is declared.
ProgramValue eval_program(const PathMeasure& eta, const StagewiseProgram& prog);

struct DiscrepancyReport {
    double lhs = 0.0;            // |v(mu) - v(nu)|
    double w1_bicausal = 0.0;    // bicausal transport with l1 cost
    double rhs = 0.0;            // r * w1_bicausal
    double entropy_rhs = 0.0;    // r * K * sqrt(Ent(nu|mu))
    bool ok = false;
};

/// Program discrepancy against the bicausal distance and its entropy bound.
DiscrepancyReport discrepancy_bound_check(const PathMeasure& mu, const PathMeasure& nu,
                                          const StagewiseProgram& prog);

struct InequalityReport {
    double w1_bc = 0.0;
    double entropy = 0.0;  // may be +infinity
    InequalityConstants constants;
    double bound = 0.0;  // K * sqrt(entropy)
    double slack = 0.0;  // bound - w1_bc
    bool holds = false;
};

/// Transport-information inequality report: W_{1,bc}(mu,nu) <= K sqrt(Ent).
/// When `a` is omitted, each a_t is grid-searched over powers of two in
/// [2^-4, 2^4] minimizing (1 + lambda_t) / a_t^2.
InequalityReport transport_info_report(const PathMeasure& mu, const PathMeasure& nu,
                                       const std::optional<std::vector<double>>& a = std::nullopt);

/// Displacement along the quantile rearrangement:
/// pushforward of kr_coupling(mu,nu) under (x,y) -> (1-t)x + ty.
PathMeasure lex_interpolate(const PathMeasure& mu, const PathMeasure& nu, double t);

/// Bicausal cost profile t -> value between mu and the interpolated measure
/// under sum_i |x_i - y_i|^p. Requires product mu; under that hypothesis the
/// profile scales like t^p.
std::vector<double> speed_profile(const PathMeasure& mu, const PathMeasure& nu, double p,
                                  const std::vector<double>& grid);

struct ConcavityProfile {
    std::vector<double> ts;
    std::vector<double> values;
    bool hypotheses_ok = false;  // declared concavity in x, convexity in u, product mu
};

/// Program values along the interpolation curve. Midpoint concavity is
/// guaranteed only under the declared hypotheses; the profile is reported
/// either way.
ConcavityProfile concavity_profile(const StagewiseProgram& prog, const PathMeasure& mu,
                                   const PathMeasure& nu, const std::vector<double>& grid);

struct TensorizationReport {
    double lhs = 0.0;  // bicausal squared-distance value
    double rhs = 0.0;  // stagewise decomposition
    bool equal = false;
    double entropy_total = 0.0;
    double entropy_chain_sum = 0.0;
    bool entropy_equal = false;
};

/// Two-stage product-source identities: the bicausal squared distance
/// splits into stage terms, and the entropy chain rule sums to the total.
TensorizationReport tensorization_identity_check(const PathMeasure& mu, const PathMeasure& nu);

}  // namespace causalot
