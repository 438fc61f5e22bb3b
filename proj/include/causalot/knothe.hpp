#pragma once

#include <vector>

#include "causalot/causal_ot.hpp"

namespace causalot {

struct HistogramSegment {
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0;
};

/// Piecewise-uniform law on a finite union of disjoint intervals.
class HistogramStage {
  public:
    static HistogramStage from_segments(std::vector<HistogramSegment> segments);

    const std::vector<HistogramSegment>& segments() const { return segments_; }
    double cdf(double x) const;
    double quantile(double u) const;
    /// mass of [a, b]
    double interval_mass(double a, double b) const;

  private:
    std::vector<HistogramSegment> segments_;
};

/// Product of independent atomless stage laws; the smallest class on which
/// the rearrangement takes Monge-map form.
struct HistogramProductMeasure {
    std::vector<HistogramStage> stages;
    int num_stages() const { return static_cast<int>(stages.size()); }
};

/// Threshold cell of an adapted map: the affine increasing bijection
/// [x_lo, x_hi) -> [y_lo, y_hi); constant (y_lo == y_hi) for atomic targets.
struct MapCell {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    double mass = 0.0;
};

struct StageMapTable {
    Path y_history;  // conditioning branch of the target; empty for product targets
    std::vector<MapCell> cells;

    double apply(double x) const;
};

struct AdaptedMapTable {
    std::vector<std::vector<StageMapTable>> stages;  // stages[t-1] = tables for stage t
};

/// Quantile rearrangement of two path measures: stagewise monotone couplings
/// of the conditional laws driven by fresh shared uniforms.
TransportPlan kr_coupling(const PathMeasure& mu, const PathMeasure& nu);

/// Monge form of the rearrangement for an atomless product source:
/// per stage the composition of the source CDF with the conditional target
/// quantile, returned as threshold tables. The pushforward matches the
/// target exactly on the generated cell decomposition.
AdaptedMapTable kr_map(const HistogramProductMeasure& mu, const PathMeasure& nu);
AdaptedMapTable kr_map(const HistogramProductMeasure& mu, const HistogramProductMeasure& nu);

/// Increasing-triangular property: the stage-1 bivariate marginal and every
/// positive-mass one-step conditional have monotone support.
bool is_itt(const TransportPlan& plan);

/// True iff the candidate is a bicausal increasing triangular transport and
/// coincides with kr_coupling(mu, nu) atom by atom within 1e-9.
bool kr_uniqueness_check(const PathMeasure& mu, const PathMeasure& nu,
                         const TransportPlan& candidate);

/// Rearrangement in increment coordinates: transform, couple, transform back.
TransportPlan increments_kr(const PathMeasure& mu, const PathMeasure& nu);

/// Checks that the one-step conditional CDF families of mu and nu move in a
/// consistent direction across ordered histories (scanning all history pairs
/// and support breakpoints). Sufficient for the rearrangement to attain the
/// bicausal value under separable convex costs.
bool kernel_order_consistent(const PathMeasure& mu, const PathMeasure& nu);

}  // namespace causalot
