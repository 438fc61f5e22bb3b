#include "causalot/knothe.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causalot/ot1d.hpp"

namespace causalot {

HistogramStage HistogramStage::from_segments(std::vector<HistogramSegment> segments) {
    std::sort(segments.begin(), segments.end(),
              [](const HistogramSegment& a, const HistogramSegment& b) { return a.lo < b.lo; });
    double total = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].hi <= segments[i].lo)
            raise(Errc::InvalidArgument, "histogram segment with nonpositive length");
        if (segments[i].mass <= 0.0)
            raise(Errc::InvalidArgument, "histogram segment with nonpositive mass");
        if (i > 0 && segments[i].lo < segments[i - 1].hi)
            raise(Errc::InvalidArgument, "overlapping histogram segments");
        total += segments[i].mass;
    }
    if (segments.empty()) raise(Errc::EmptySupport, "histogram without segments");
    if (std::abs(total - 1.0) > tol::input)
        raise(Errc::UnnormalizedWeights, "histogram masses sum to " + std::to_string(total));
    HistogramStage stage;
    stage.segments_ = std::move(segments);
    return stage;
}

double HistogramStage::cdf(double x) const {
    double acc = 0.0;
    for (const auto& seg : segments_) {
        if (x >= seg.hi) {
            acc += seg.mass;
        } else if (x > seg.lo) {
            acc += seg.mass * (x - seg.lo) / (seg.hi - seg.lo);
            break;
        } else {
            break;
        }
    }
    return acc;
}

double HistogramStage::quantile(double u) const {
    double acc = 0.0;
    for (const auto& seg : segments_) {
        if (u <= acc + seg.mass)
            return seg.lo + (seg.hi - seg.lo) * std::max(0.0, u - acc) / seg.mass;
        acc += seg.mass;
    }
    return segments_.back().hi;
}

double HistogramStage::interval_mass(double a, double b) const {
    return std::max(0.0, cdf(b) - cdf(a));
}

TransportPlan kr_coupling(const PathMeasure& mu, const PathMeasure& nu) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    struct Partial {
        Path x, y;
        double weight;
    };
    std::vector<Partial> partials;
    for (const auto& cell : monotone_coupling(mu.stage_marginal(1), nu.stage_marginal(1)))
        partials.push_back({{cell.x}, {cell.y}, cell.weight});
    for (int t = 1; t < mu.num_stages(); ++t) {
        std::vector<Partial> grown;
        // conditional couplings depend only on the history pair, so group
        // partials sharing one
        std::map<std::pair<Path, Path>, Coupling1D> cache;
        for (const auto& part : partials) {
            auto key = std::make_pair(part.x, part.y);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, monotone_coupling(mu.conditional(part.x),
                                                          nu.conditional(part.y)))
                         .first;
            for (const auto& cell : it->second) {
                Partial next = part;
                next.x.push_back(cell.x);
                next.y.push_back(cell.y);
                next.weight = part.weight * cell.weight;
                grown.push_back(std::move(next));
            }
        }
        partials = std::move(grown);
    }
    std::vector<PlanAtom> atoms;
    atoms.reserve(partials.size());
    for (auto& part : partials) atoms.push_back({std::move(part.x), std::move(part.y), part.weight});
    return TransportPlan::from_atoms(std::move(atoms));
}

namespace {

/// Position of a cumulative level inside a piecewise-uniform law. At a
/// segment boundary, `upward` picks the start of the next segment (for cell
/// left ends) and otherwise the end of the previous one (for right ends).
double level_position(const HistogramStage& h, double u, bool upward) {
    double acc = 0.0;
    for (const auto& seg : h.segments()) {
        const double next = acc + seg.mass;
        const bool inside = upward ? (u < next) : (u <= next && u > acc);
        if (inside || (upward && u <= acc))
            return seg.lo + (seg.hi - seg.lo) * std::clamp((u - acc) / seg.mass, 0.0, 1.0);
        acc = next;
    }
    return h.segments().back().hi;
}

/// One stage of the map: common refinement of the source cumulative levels
/// with the target cumulative breakpoints; x positions are affine within a
/// source segment, y positions constant (atoms) or affine (histogram).
template <typename TargetPosition>
std::vector<MapCell> stage_cells(const HistogramStage& source, const std::vector<double>& target_levels,
                                 TargetPosition target_position) {
    std::vector<double> levels{0.0, 1.0};
    double acc = 0.0;
    for (const auto& seg : source.segments()) {
        acc += seg.mass;
        levels.push_back(std::min(acc, 1.0));
    }
    levels.insert(levels.end(), target_levels.begin(), target_levels.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<MapCell> cells;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const double u0 = levels[k], u1 = levels[k + 1];
        if (u1 - u0 <= 1e-15) continue;
        MapCell cell;
        cell.x_lo = level_position(source, u0, true);
        cell.x_hi = level_position(source, u1, false);
        cell.mass = u1 - u0;
        target_position(u0, u1, cell);
        cells.push_back(cell);
    }
    return cells;
}

std::vector<double> atomic_levels(const Distribution1D& q) {
    std::vector<double> levels;
    double acc = 0.0;
    for (double w : q.weights()) {
        acc += w;
        levels.push_back(std::min(acc, 1.0));
    }
    levels.back() = 1.0;
    return levels;
}

}  // namespace

AdaptedMapTable kr_map(const HistogramProductMeasure& mu, const PathMeasure& nu) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    AdaptedMapTable table;
    table.stages.resize(mu.num_stages());
    for (int t = 1; t <= mu.num_stages(); ++t) {
        for (const auto& history : nu.histories(t - 1)) {
            const Distribution1D q = (t == 1) ? nu.stage_marginal(1) : nu.conditional(history);
            StageMapTable stage_table;
            stage_table.y_history = history;
            stage_table.cells = stage_cells(
                mu.stages[t - 1], atomic_levels(q), [&](double u0, double u1, MapCell& cell) {
                    // the atom containing (u0, u1)
                    double acc = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i) {
                        if (u0 >= acc - 1e-15 && u1 <= acc + q.weights()[i] + 1e-15) {
                            cell.y_lo = cell.y_hi = q.values()[i];
                            return;
                        }
                        acc += q.weights()[i];
                    }
                    cell.y_lo = cell.y_hi = q.values().back();
                });
            table.stages[t - 1].push_back(std::move(stage_table));
        }
    }
    return table;
}

AdaptedMapTable kr_map(const HistogramProductMeasure& mu, const HistogramProductMeasure& nu) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    AdaptedMapTable table;
    table.stages.resize(mu.num_stages());
    for (int t = 1; t <= mu.num_stages(); ++t) {
        const HistogramStage& target = nu.stages[t - 1];
        std::vector<double> levels;
        double acc = 0.0;
        for (const auto& seg : target.segments()) {
            acc += seg.mass;
            levels.push_back(std::min(acc, 1.0));
        }
        StageMapTable stage_table;
        stage_table.cells =
            stage_cells(mu.stages[t - 1], levels, [&](double u0, double u1, MapCell& cell) {
                cell.y_lo = level_position(target, u0, true);
                cell.y_hi = level_position(target, u1, false);
            });
        table.stages[t - 1].push_back(std::move(stage_table));
    }
    return table;
}

double StageMapTable::apply(double x) const {
    for (const auto& cell : cells) {
        if (x >= cell.x_lo && (x < cell.x_hi || &cell == &cells.back())) {
            if (cell.y_lo == cell.y_hi || cell.x_hi == cell.x_lo) return cell.y_lo;
            return cell.y_lo + (cell.y_hi - cell.y_lo) * (x - cell.x_lo) / (cell.x_hi - cell.x_lo);
        }
    }
    raise(Errc::ParameterOutOfRange, "map evaluated outside the source support");
}

bool is_itt(const TransportPlan& plan) {
    for (int t = 0; t < plan.num_stages(); ++t) {
        std::map<std::pair<Path, Path>, std::vector<std::pair<double, double>>> groups;
        for (const auto& atom : plan.atoms()) {
            Path gx(atom.x.begin(), atom.x.begin() + t);
            Path gy(atom.y.begin(), atom.y.begin() + t);
            groups[{std::move(gx), std::move(gy)}].emplace_back(atom.x[t], atom.y[t]);
        }
        for (auto& [key, pairs] : groups) {
            std::sort(pairs.begin(), pairs.end());
            // every y at a smaller x must not exceed any y at a larger x
            double running_max = pairs.front().second;
            double prev_x = pairs.front().first;
            for (std::size_t i = 1; i < pairs.size(); ++i) {
                if (pairs[i].first > prev_x) {
                    if (pairs[i].second < running_max) return false;
                    prev_x = pairs[i].first;
                }
                running_max = std::max(running_max, pairs[i].second);
            }
        }
    }
    return true;
}

bool kr_uniqueness_check(const PathMeasure& mu, const PathMeasure& nu,
                         const TransportPlan& candidate) {
    // marginal precondition; is_causal performs the same check
    if (!is_bicausal(candidate, mu, nu).ok) return false;
    if (!is_itt(candidate)) return false;
    const TransportPlan reference = kr_coupling(mu, nu);
    std::map<std::pair<Path, Path>, double> weights;
    for (const auto& atom : reference.atoms()) weights[{atom.x, atom.y}] += atom.weight;
    for (const auto& atom : candidate.atoms()) weights[{atom.x, atom.y}] -= atom.weight;
    for (const auto& [key, diff] : weights)
        if (std::abs(diff) > tol::input) return false;
    return true;
}

TransportPlan increments_kr(const PathMeasure& mu, const PathMeasure& nu) {
    const TransportPlan delta_plan = kr_coupling(increments(mu), increments(nu));
    std::vector<PlanAtom> atoms;
    atoms.reserve(delta_plan.size());
    for (const auto& atom : delta_plan.atoms()) {
        PlanAtom mapped;
        mapped.weight = atom.weight;
        mapped.x.resize(atom.x.size());
        mapped.y.resize(atom.y.size());
        double ax = 0.0, ay = 0.0;
        for (std::size_t i = 0; i < atom.x.size(); ++i) {
            ax += atom.x[i];
            ay += atom.y[i];
            mapped.x[i] = ax;
            mapped.y[i] = ay;
        }
        atoms.push_back(std::move(mapped));
    }
    return TransportPlan::from_atoms(std::move(atoms));
}

namespace {

/// Sign pattern of F_{m^{h last'}} - F_{m^{h last}} over ordered sibling
/// histories, evaluated on the grid; fills has_pos/has_neg per grid point.
void sibling_sign_pattern(const PathMeasure& m, int prefix_len, const std::vector<double>& grid,
                          std::vector<bool>& has_pos, std::vector<bool>& has_neg) {
    std::map<Path, std::vector<Path>> groups;
    for (const auto& h : m.histories(prefix_len + 1)) {
        Path prefix(h.begin(), h.end() - 1);
        groups[std::move(prefix)].push_back(h);
    }
    for (const auto& [prefix, siblings] : groups) {
        for (std::size_t s = 0; s + 1 < siblings.size(); ++s) {
            const Distribution1D lo = m.conditional(siblings[s]);
            const Distribution1D hi = m.conditional(siblings[s + 1]);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double diff = hi.cdf(grid[g]) - lo.cdf(grid[g]);
                if (diff > tol::internal) has_pos[g] = true;
                if (diff < -tol::internal) has_neg[g] = true;
            }
        }
    }
}

}  // namespace

bool kernel_order_consistent(const PathMeasure& mu, const PathMeasure& nu) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    for (int prefix_len = 0; prefix_len + 2 <= mu.num_stages(); ++prefix_len) {
        const int stage = prefix_len + 2;  // coordinate whose conditional laws are compared
        std::vector<double> grid;
        for (const auto& atom : mu.atoms()) grid.push_back(atom.path[stage - 1]);
        for (const auto& atom : nu.atoms()) grid.push_back(atom.path[stage - 1]);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        std::vector<bool> mu_pos(grid.size(), false), mu_neg(grid.size(), false);
        std::vector<bool> nu_pos(grid.size(), false), nu_neg(grid.size(), false);
        sibling_sign_pattern(mu, prefix_len, grid, mu_pos, mu_neg);
        sibling_sign_pattern(nu, prefix_len, grid, nu_pos, nu_neg);
        for (std::size_t g = 0; g < grid.size(); ++g)
            if ((mu_pos[g] && nu_neg[g]) || (mu_neg[g] && nu_pos[g])) return false;
    }
    return true;
}

}  // namespace causalot
