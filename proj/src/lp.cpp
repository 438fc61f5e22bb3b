#include "causalot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace causalot {

namespace {

constexpr double kOptTol = 1e-9;    // reduced-cost optimality threshold
constexpr double kPivotTol = 1e-11; // smallest acceptable pivot magnitude
constexpr double kFeasTol = 1e-9;   // phase-1 infeasibility threshold

/// Dense tableau with an explicit artificial block; the artificial columns
/// carry B^{-1}, which is how the duals are recovered at the end.
class Tableau {
  public:
    explicit Tableau(const LinearProgram& lp)
        : m_(lp.num_rows()), n_(lp.num_vars()), width_(n_ + m_ + 1), cells_(m_ * width_, 0.0),
          basis_(m_), row_sign_(m_, 1.0), cost_(width_, 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
            const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
            row_sign_[i] = sign;
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * lp.rows[i][j];
            at(i, n_ + i) = 1.0;
            at(i, width_ - 1) = sign * lp.rhs[i];
            basis_[i] = n_ + i;
        }
    }

    double& at(std::size_t r, std::size_t c) { return cells_[r * width_ + c]; }
    double at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c]; }
    double rhs(std::size_t r) const { return at(r, width_ - 1); }

    std::size_t rows() const { return m_; }
    std::size_t vars() const { return n_; }
    std::size_t basis(std::size_t r) const { return basis_[r]; }
    double row_sign(std::size_t r) const { return row_sign_[r]; }

    /// Rebuilds the reduced-cost row for the given per-column cost vector
    /// (artificials get cost `artificial_cost`).
    void load_costs(const std::vector<double>& c, double artificial_cost) {
        for (std::size_t j = 0; j < width_; ++j) cost_[j] = 0.0;
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = c[j];
        for (std::size_t j = n_; j + 1 < width_; ++j) cost_[j] = artificial_cost;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = basis_[i] < n_ ? c[basis_[i]] : artificial_cost;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) cost_[j] -= cb * at(i, j);
        }
    }

    double reduced_cost(std::size_t j) const { return cost_[j]; }
    double objective_offset() const { return -cost_[width_ - 1]; }

    void pivot(std::size_t r, std::size_t s) {
        const double piv = at(r, s);
        for (std::size_t j = 0; j < width_; ++j) at(r, j) /= piv;
        at(r, s) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double factor = at(i, s);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) at(i, j) -= factor * at(r, j);
            at(i, s) = 0.0;
        }
        const double cfac = cost_[s];
        if (cfac != 0.0) {
            for (std::size_t j = 0; j < width_; ++j) cost_[j] -= cfac * at(r, j);
            cost_[s] = 0.0;
        }
        basis_[r] = s;
    }

  private:
    std::size_t m_, n_, width_;
    std::vector<double> cells_;
    std::vector<std::size_t> basis_;
    std::vector<double> row_sign_;
    std::vector<double> cost_;
};

enum class PhaseResult { Converged, Unbounded };

/// Runs simplex iterations on the current cost row until optimality.
/// `allow_artificial_entering` is true only in phase 1. Switches to Bland's
/// rule permanently once `bland_after` iterations have accumulated.
PhaseResult run_simplex(Tableau& t, bool allow_artificial_entering, int& iterations,
                        int bland_after) {
    const std::size_t n = t.vars();
    const std::size_t total = n + t.rows();
    const std::size_t entering_limit = allow_artificial_entering ? total : n;

    while (true) {
        const bool bland = iterations >= bland_after;
        std::size_t enter = total;
        double best = -kOptTol;
        for (std::size_t j = 0; j < entering_limit; ++j) {
            const double d = t.reduced_cost(j);
            if (d < best) {
                enter = j;
                if (bland) break;  // smallest index with negative reduced cost
                best = d;
            }
        }
        if (enter == total) return PhaseResult::Converged;

        std::size_t leave = t.rows();
        double best_ratio = std::numeric_limits<double>::infinity();
        bool tiny_pivot_seen = false;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= kPivotTol) {
                if (a > 0.0) tiny_pivot_seen = true;
                continue;
            }
            const double ratio = t.rhs(i) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 &&
                 (leave == t.rows() || t.basis(i) < t.basis(leave)))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == t.rows()) {
            if (tiny_pivot_seen)
                raise(Errc::NumericalBreakdown,
                      "candidate pivots below 1e-11 in entering column " + std::to_string(enter));
            return PhaseResult::Unbounded;
        }
        t.pivot(leave, enter);
        ++iterations;
        if (iterations > 500000)
            raise(Errc::NumericalBreakdown, "iteration limit exceeded");
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t m = lp.num_rows();
    const std::size_t n = lp.num_vars();
    if (lp.rhs.size() != m) raise(Errc::InvalidArgument, "rhs size mismatch");
    for (const auto& row : lp.rows)
        if (row.size() != n) raise(Errc::InvalidArgument, "row width mismatch");
    for (double v : lp.objective)
        if (!std::isfinite(v)) raise(Errc::InvalidArgument, "non-finite objective entry");

    Tableau t(lp);
    LpSolution sol;
    int iterations = 0;
    const int bland_after = static_cast<int>(20 * (m + n) + 200);

    // phase 1: minimize the sum of artificials
    t.load_costs(std::vector<double>(n, 0.0), 1.0);
    if (run_simplex(t, true, iterations, bland_after) == PhaseResult::Unbounded)
        raise(Errc::NumericalBreakdown, "phase-1 objective unbounded");
    if (t.objective_offset() > kFeasTol) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations;
        return sol;
    }

    // drive basic artificials out where the row has an eligible original
    // coefficient; rows without one are redundant and stay inert
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis(i) < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(t.at(i, j)) > kPivotTol) {
                t.pivot(i, j);
                ++iterations;
                break;
            }
        }
    }

    // phase 2 on the real objective, artificials barred from entering
    t.load_costs(lp.objective, 0.0);
    if (run_simplex(t, false, iterations, bland_after) == PhaseResult::Unbounded) {
        sol.status = LpStatus::Unbounded;
        sol.iterations = iterations;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.iterations = iterations;
    sol.primal.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis(i) < n) sol.primal[t.basis(i)] = t.rhs(i);

    // duals via y^T = c_B^T B^{-1}; the artificial block of the tableau is
    // B^{-1} for the sign-normalized rows
    sol.dual.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double y = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t b = t.basis(r);
            if (b < n && lp.objective[b] != 0.0) y += lp.objective[b] * t.at(r, n + i);
        }
        sol.dual[i] = t.row_sign(i) * y;
    }

    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.primal[j];
    sol.objective = obj;

    double feas = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += lp.rows[i][j] * sol.primal[j];
        feas = std::max(feas, std::abs(lhs - lp.rhs[i]));
    }
    sol.feasibility_residual = feas;

    double comp = 0.0;
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) dual_obj += sol.dual[i] * lp.rhs[i];
    for (std::size_t j = 0; j < n; ++j) {
        double slack = lp.objective[j];
        for (std::size_t i = 0; i < m; ++i) slack -= sol.dual[i] * lp.rows[i][j];
        comp = std::max(comp, std::abs(slack * sol.primal[j]));
    }
    sol.complementarity_residual = comp;
    sol.duality_gap = std::abs(obj - dual_obj);
    return sol;
}

}  // namespace causalot
