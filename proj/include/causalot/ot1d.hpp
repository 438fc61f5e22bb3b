#pragma once

#include <functional>
#include <vector>

#include "causalot/measures.hpp"

namespace causalot {

struct Coupling1DAtom {
    double x = 0.0;
    double y = 0.0;
    double weight = 0.0;
};

using Coupling1D = std::vector<Coupling1DAtom>;

/// Quantile coupling (F_p^{-1}(U), F_q^{-1}(U)) for a shared uniform U,
/// realized by merging the cumulative-weight breakpoints of p and q.
/// The support is monotone and the marginals are exact.
Coupling1D monotone_coupling(const Distribution1D& p, const Distribution1D& q);

/// Cost of the monotone coupling under c(x - y); equals the optimal
/// transport cost between p and q whenever c is convex.
double ot1d_cost(const Distribution1D& p, const Distribution1D& q,
                 const std::function<double(double)>& c);

/// 1-Wasserstein distance as the exact integral of |F_p - F_q|.
double w1(const Distribution1D& p, const Distribution1D& q);

}  // namespace causalot
