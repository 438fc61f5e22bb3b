#include "causalot/ot1d.hpp"

#include <algorithm>
#include <cmath>

namespace causalot {

Coupling1D monotone_coupling(const Distribution1D& p, const Distribution1D& q) {
    // cumulative breakpoints, with the final entries pinned to 1 so both
    // ladders terminate together
    auto cumulative = [](const Distribution1D& d) {
        std::vector<double> cum(d.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            acc += d.weights()[i];
            cum[i] = acc;
        }
        cum.back() = 1.0;
        return cum;
    };
    const std::vector<double> cp = cumulative(p);
    const std::vector<double> cq = cumulative(q);

    Coupling1D cells;
    std::size_t i = 0, j = 0;
    double level = 0.0;
    while (i < p.size() && j < q.size()) {
        const double next = std::min(cp[i], cq[j]);
        const double mass = next - level;
        if (mass > 0.0) cells.push_back({p.values()[i], q.values()[j], mass});
        level = next;
        if (cp[i] == next) ++i;
        if (cq[j] == next) ++j;
    }
    return cells;
}

double ot1d_cost(const Distribution1D& p, const Distribution1D& q,
                 const std::function<double(double)>& c) {
    double acc = 0.0;
    for (const auto& cell : monotone_coupling(p, q)) acc += cell.weight * c(cell.x - cell.y);
    return acc;
}

double w1(const Distribution1D& p, const Distribution1D& q) {
    std::vector<double> grid = p.values();
    grid.insert(grid.end(), q.values().begin(), q.values().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        acc += std::abs(p.cdf(grid[i]) - q.cdf(grid[i])) * (grid[i + 1] - grid[i]);
    return acc;
}

}  // namespace causalot
