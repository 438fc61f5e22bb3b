#pragma once

#include <cstddef>
#include <vector>

#include "causalot/common.hpp"

namespace causalot {

/// min c^T x  s.t.  A x = b,  x >= 0, with dense rows.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rows.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> primal;
    std::vector<double> dual;  // one multiplier per equality row
    double objective = 0.0;
    int iterations = 0;

    // residuals recorded at the returned basis
    double feasibility_residual = 0.0;
    double complementarity_residual = 0.0;
    double duality_gap = 0.0;
};

/// Two-phase dense tableau simplex. Dantzig pricing with a permanent switch
/// to Bland's rule after an iteration threshold, so termination is
/// guaranteed. Returns the exact-basis primal and the dual multipliers read
/// off the final tableau. Redundant equality rows are tolerated (their
/// artificial stays basic at level zero with dual multiplier zero).
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace causalot
