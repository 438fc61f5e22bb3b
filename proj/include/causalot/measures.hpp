#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "causalot/common.hpp"

namespace causalot {

/// Finitely supported law on the real line, kept sorted by value with
/// distinct atoms and normalized weights.
class Distribution1D {
  public:
    Distribution1D() = default;

    /// Merges duplicate values, drops nonpositive weights, checks normalization
    /// within tol::input.
    static Distribution1D from_atoms(std::vector<std::pair<double, double>> atoms);

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return values_.size(); }

    /// F(z) = mass of (-inf, z].
    double cdf(double z) const;

    /// Left-continuous generalized inverse, F^{-1}(u) = inf{y : F(y) >= u}.
    double quantile(double u) const;

    double mean() const;

  private:
    std::vector<double> values_;
    std::vector<double> weights_;
};

struct WeightedPath {
    Path path;
    double weight = 0.0;
};

/// One-step conditional distributions of a path measure at a fixed stage,
/// indexed by the positive-mass histories of that stage.
struct StageKernel {
    int stage = 0;  // histories have `stage` coordinates; values are laws of coordinate stage+1
    std::map<Path, Distribution1D, PathLess> table;

    const Distribution1D& at(const Path& history) const;
};

/// Finitely supported probability measure on N-step paths.
///
/// Atoms are deduplicated by exact coordinate equality, sorted
/// lexicographically and carry strictly positive weights summing to one.
class PathMeasure {
  public:
    PathMeasure() = default;

    /// Validating constructor: rejects ragged paths, empty support and weight
    /// sums deviating from 1 by more than tol::input; duplicates are merged
    /// and zero-weight atoms dropped.
    static PathMeasure from_atoms(std::vector<WeightedPath> raw_atoms);

    int num_stages() const { return num_stages_; }
    const std::vector<WeightedPath>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    /// Mass of the set of paths beginning with `prefix`.
    double prefix_mass(std::span<const double> prefix) const;

    /// Weight of an exact path, 0 if absent.
    double mass_of(const Path& path) const;

    /// Marginal law of the first `stages` coordinates.
    PathMeasure prefix_marginal(int stages) const;

    /// Law of the single coordinate at `stage` (1-based).
    Distribution1D stage_marginal(int stage) const;

    /// All positive-mass histories of length `stage`.
    std::vector<Path> histories(int stage) const;

    /// Conditional law of coordinate stage+1 given a positive-mass history of
    /// length `stage`.
    Distribution1D conditional(std::span<const double> history) const;

  private:
    int num_stages_ = 0;
    std::vector<WeightedPath> atoms_;
};

struct StructureFlags {
    bool is_markov = false;
    bool is_product = false;
    bool has_independent_increments = false;
};

/// Constants entering the bicausal transport-information bound.
struct InequalityConstants {
    std::vector<double> a;       // per-stage exponential-moment scales, a_t > 0
    std::vector<double> lambda;  // per-stage log moment bounds
    double lipschitz = 0.0;      // kernel Lipschitz constant C
    double k = 0.0;              // aggregated constant K

    /// K = sqrt(2 sum_{j<N} (1+C)^{2j} (1+lambda_{N-j}) / a_{N-j}^2).
    static double aggregate(const std::vector<double>& a, const std::vector<double>& lambda,
                            double lipschitz);
};

/// Splits m into its first-t-stage marginal and the stage-t one-step kernel.
/// Recomposition reproduces the (t+1)-stage marginal exactly.
std::pair<PathMeasure, StageKernel> disintegrate(const PathMeasure& m, int t);

StructureFlags structure_flags(const PathMeasure& m);

/// Maps (x_1,...,x_N) to (x_1, x_2-x_1, ..., x_N - x_{N-1}).
PathMeasure increments(const PathMeasure& m);

/// Inverse of increments(): cumulative sums along each path.
PathMeasure cumulate(const PathMeasure& m);

/// Ent(nu|mu) = sum nu(a) log(nu(a)/mu(a)); +infinity outside supp(mu).
double relative_entropy(const PathMeasure& nu, const PathMeasure& mu);

/// Stagewise decomposition of the relative entropy: term 0 is Ent(nu_1|mu_1),
/// term t is the nu-average of Ent(nu^{y_1..y_t}|mu^{y_1..y_t}).
/// Requires nu absolutely continuous w.r.t. mu.
std::vector<double> entropy_chain(const PathMeasure& nu, const PathMeasure& mu);

/// Smallest C with W_1(mu^h, mu^{h'}) <= C * ||h - h'||_1 over positive-mass
/// history pairs; 0 for product measures and single-history stages.
double lip_constant(const PathMeasure& mu);

/// Smallest lambda_t with int exp(a_t x^2) dmu^{history} <= exp(lambda_t) over
/// positive-mass histories, computed in log-space.
std::vector<double> exp_constants(const PathMeasure& mu, const std::vector<double>& a);

}  // namespace causalot
