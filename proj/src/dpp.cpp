#include "causalot/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causalot/ot1d.hpp"

namespace causalot {

namespace {

constexpr double kFwGapTol = 1e-6;
constexpr double kFwGradStep = 1e-6;
constexpr int kFwMaxIterations = 10000;

struct SmallOt {
    double value = 0.0;
    std::vector<std::vector<double>> coupling;  // row i, column j
};

/// Classical transport between two small discrete marginals with an explicit
/// cost matrix, via the simplex oracle. Any equal positive total mass.
SmallOt transport_lp(const std::vector<double>& p, const std::vector<double>& q,
                     const std::vector<std::vector<double>>& cost) {
    const std::size_t np = p.size(), nq = q.size();
    LinearProgram lp;
    lp.objective.resize(np * nq);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nq; ++j) lp.objective[i * nq + j] = cost[i][j];
    for (std::size_t i = 0; i < np; ++i) {
        std::vector<double> row(np * nq, 0.0);
        for (std::size_t j = 0; j < nq; ++j) row[i * nq + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(p[i]);
    }
    for (std::size_t j = 0; j < nq; ++j) {
        std::vector<double> row(np * nq, 0.0);
        for (std::size_t i = 0; i < np; ++i) row[i * nq + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(q[j]);
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        raise(Errc::NumericalBreakdown, "stage transport LP not optimal");
    SmallOt out;
    out.value = sol.objective;
    out.coupling.assign(np, std::vector<double>(nq, 0.0));
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nq; ++j) out.coupling[i][j] = sol.primal[i * nq + j];
    return out;
}

Path extend(const Path& prefix, double value) {
    Path out = prefix;
    out.push_back(value);
    return out;
}

}  // namespace

BicausalDppResult bicausal_dpp(const PathMeasure& mu, const PathMeasure& nu,
                               const CostSpec& cost) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    const int n = mu.num_stages();

    // stage-cost contribution paid at level t (coupling coordinate t+1 given
    // histories g, h); general costs pay everything at the terminal level
    auto stage_term = [&](int t, const Path& g, const Path& h, double a, double b) -> double {
        switch (cost.kind()) {
            case CostSpec::Kind::General:
                return t + 1 == n ? cost.evaluate(extend(g, a), extend(h, b)) : 0.0;
            case CostSpec::Kind::Separable:
            case CostSpec::Kind::Semiseparable:
                return cost.stage_term(t + 1, a, extend(h, b));
            case CostSpec::Kind::IncrementSeparable:
                return t == 0 ? cost.increment_term(1, a, b)
                              : cost.increment_term(t + 1, a - g.back(), b - h.back());
        }
        return 0.0;
    };

    // a terminal-level matrix is convex in a-b when declared so; the
    // monotone coupling is then optimal without an LP solve
    const bool terminal_monotone =
        cost.convex_difference() && (cost.kind() == CostSpec::Kind::Separable ||
                                     cost.kind() == CostSpec::Kind::IncrementSeparable);

    std::map<std::pair<Path, Path>, double> next_values;
    std::vector<std::map<std::pair<Path, Path>, Coupling1D>> stored(n);
    double root_value = 0.0;

    for (int t = n - 1; t >= 0; --t) {
        std::map<std::pair<Path, Path>, double> values;
        for (const auto& g : mu.histories(t)) {
            const Distribution1D p = (t == 0) ? mu.stage_marginal(1) : mu.conditional(g);
            for (const auto& h : nu.histories(t)) {
                const Distribution1D q = (t == 0) ? nu.stage_marginal(1) : nu.conditional(h);
                double value = 0.0;
                Coupling1D cells;
                if (t + 1 == n && terminal_monotone) {
                    cells = monotone_coupling(p, q);
                    for (const auto& cell : cells)
                        value += cell.weight * stage_term(t, g, h, cell.x, cell.y);
                } else {
                    std::vector<std::vector<double>> c(p.size(), std::vector<double>(q.size()));
                    for (std::size_t i = 0; i < p.size(); ++i)
                        for (std::size_t j = 0; j < q.size(); ++j) {
                            const double a = p.values()[i], b = q.values()[j];
                            c[i][j] = stage_term(t, g, h, a, b) +
                                      (t + 1 < n ? next_values.at({extend(g, a), extend(h, b)})
                                                 : 0.0);
                        }
                    SmallOt ot = transport_lp(std::vector<double>(p.weights()),
                                              std::vector<double>(q.weights()), c);
                    value = ot.value;
                    for (std::size_t i = 0; i < p.size(); ++i)
                        for (std::size_t j = 0; j < q.size(); ++j)
                            if (ot.coupling[i][j] > 1e-14)
                                cells.push_back(
                                    {p.values()[i], q.values()[j], ot.coupling[i][j]});
                }
                values[{g, h}] = value;
                stored[t][{g, h}] = std::move(cells);
            }
        }
        if (t == 0) root_value = values.begin()->second;
        next_values = std::move(values);
    }

    // forward concatenation of the per-history couplings
    struct Partial {
        Path x, y;
        double weight;
    };
    std::vector<Partial> partials;
    for (const auto& cell : stored[0].at({Path{}, Path{}}))
        partials.push_back({{cell.x}, {cell.y}, cell.weight});
    for (int t = 1; t < n; ++t) {
        std::vector<Partial> grown;
        for (const auto& part : partials) {
            for (const auto& cell : stored[t].at({part.x, part.y})) {
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
    for (auto& part : partials)
        if (part.weight > 0.0) atoms.push_back({std::move(part.x), std::move(part.y), part.weight});

    BicausalDppResult result;
    result.plan = TransportPlan::from_atoms(std::move(atoms));
    result.value = root_value;

    // the recursion value and the assembled plan cost agree by construction;
    // keep the recursion value as the reported one
    return result;
}

CausalDpp::CausalDpp(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost)
    : mu_(mu), nu_(nu), cost_(cost) {
    if (mu.num_stages() != nu.num_stages())
        raise(Errc::WrongStageCount, "mu and nu must have the same number of stages");
    if (!cost.is_semiseparable())
        raise(Errc::NotSemiseparable, "causal recursion needs a (semi)separable cost");
    if (mu.num_stages() > 3)
        raise(Errc::StageLimitExceeded, "causal recursion is limited to N <= 3");
    if (!structure_flags(mu).is_markov) raise(Errc::NotMarkov, "causal recursion needs Markov mu");

    markov_kernels_.resize(mu.num_stages());
    for (int t = 1; t < mu.num_stages(); ++t) {
        for (const auto& history : mu.histories(t)) {
            const double last = history.back();
            if (!markov_kernels_[t].count(last))
                markov_kernels_[t].emplace(last, mu.conditional(history));
        }
    }
}

double CausalDpp::value() {
    const Distribution1D p = mu_.stage_marginal(1);
    std::vector<double> m(p.weights());
    return solve_stage(0, Path{}, m, p.values());
}

double CausalDpp::stage_value(int t, const Path& y_history, const std::map<double, double>& m) {
    if (t < 1 || t >= mu_.num_stages()) raise(Errc::StageOutOfRange, "stage_value level");
    // mix m through the stage-t Markov kernel to get the next coordinate law
    std::map<double, double> mixture;
    for (const auto& [x, w] : m) {
        if (w == 0.0) continue;
        const auto it = markov_kernels_[t].find(x);
        if (it == markov_kernels_[t].end())
            raise(Errc::InvalidArgument, "kernel weight on unsupported x value");
        for (std::size_t i = 0; i < it->second.size(); ++i)
            mixture[it->second.values()[i]] += w * it->second.weights()[i];
    }
    std::vector<double> support, weights;
    for (const auto& [v, w] : mixture) {
        support.push_back(v);
        weights.push_back(w);
    }
    return solve_stage(t, y_history, weights, support);
}

/// Stage problem at level t: couple the (already mixed) first marginal m on
/// `m_support` against nu^{y_history} scaled to the same total mass; linear
/// stage cost plus the recursion value of each column as continuation.
double CausalDpp::solve_stage(int t, const Path& y_history, const std::vector<double>& m,
                              const std::vector<double>& m_support) {
    const int n = mu_.num_stages();
    const double total = std::accumulate(m.begin(), m.end(), 0.0);
    if (total <= 0.0) return 0.0;

    const Distribution1D q = (t == 0) ? nu_.stage_marginal(1) : nu_.conditional(y_history);
    const std::size_t np = m_support.size(), nq = q.size();
    std::vector<double> col_target(nq);
    for (std::size_t j = 0; j < nq; ++j) col_target[j] = total * q.weights()[j];

    std::vector<std::vector<double>> linear(np, std::vector<double>(nq));
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nq; ++j)
            linear[i][j] = cost_.stage_term(t + 1, m_support[i], extend(y_history, q.values()[j]));

    if (t + 1 == n) return transport_lp(m, col_target, linear).value;

    // continuation of column j as a kernel over the x values
    auto continuation = [&](const std::vector<std::vector<double>>& gamma, std::size_t j,
                            std::ptrdiff_t bump_index, double bump) -> double {
        std::map<double, double> column;
        for (std::size_t i = 0; i < np; ++i) {
            double w = gamma[i][j];
            if (bump_index == static_cast<std::ptrdiff_t>(i)) w += bump;
            if (w != 0.0) column[m_support[i]] = w;
        }
        if (column.empty()) return 0.0;
        return stage_value(t + 1, extend(y_history, q.values()[j]), column);
    };

    auto objective = [&](const std::vector<std::vector<double>>& gamma) -> double {
        double acc = 0.0;
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < nq; ++j) acc += linear[i][j] * gamma[i][j];
        for (std::size_t j = 0; j < nq; ++j) acc += continuation(gamma, j, -1, 0.0);
        return acc;
    };

    // initial point: warm start from the cached optimizer at this node when
    // the supports line up, otherwise the independent coupling
    std::vector<std::vector<double>> gamma(np, std::vector<double>(nq));
    const std::pair<int, Path> cache_key{t, y_history};
    bool warmed = false;
    if (auto it = warm_.find(cache_key); it != warm_.end()) {
        const auto& [prev_support, prev_gamma] = it->second;
        if (prev_support == m_support && prev_gamma.size() == np * nq) {
            // rescale to the new total, then repair row marginals keeping columns:
            // shrink overfull rows proportionally and redistribute the removed
            // mass to underfull rows with the removed column profile
            std::vector<double> prev_rows(np, 0.0);
            double prev_total = 0.0;
            std::vector<std::vector<double>> g(np, std::vector<double>(nq));
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < nq; ++j) {
                    g[i][j] = prev_gamma[i * nq + j];
                    prev_rows[i] += g[i][j];
                    prev_total += g[i][j];
                }
            if (prev_total > 0.0) {
                const double scale = total / prev_total;
                for (auto& row : g)
                    for (double& v : row) v *= scale;
                for (double& v : prev_rows) v *= scale;
                std::vector<double> delta(np);
                double removed_total = 0.0, added_total = 0.0;
                std::vector<double> removed_cols(nq, 0.0);
                for (std::size_t i = 0; i < np; ++i) delta[i] = m[i] - prev_rows[i];
                for (std::size_t i = 0; i < np; ++i) {
                    if (delta[i] < 0.0 && prev_rows[i] > 0.0) {
                        const double frac = -delta[i] / prev_rows[i];
                        for (std::size_t j = 0; j < nq; ++j) {
                            const double moved = g[i][j] * frac;
                            g[i][j] -= moved;
                            removed_cols[j] += moved;
                            removed_total += moved;
                        }
                    } else if (delta[i] > 0.0) {
                        added_total += delta[i];
                    }
                }
                if (std::abs(added_total - removed_total) <= 1e-9 && removed_total > 0.0) {
                    for (std::size_t i = 0; i < np; ++i)
                        if (delta[i] > 0.0)
                            for (std::size_t j = 0; j < nq; ++j)
                                g[i][j] += delta[i] * removed_cols[j] / removed_total;
                    gamma = std::move(g);
                    warmed = true;
                } else if (removed_total == 0.0 && added_total <= 1e-15) {
                    gamma = std::move(g);
                    warmed = true;
                }
            }
        }
    }
    if (!warmed)
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < nq; ++j) gamma[i][j] = m[i] * q.weights()[j];

    double current = objective(gamma);
    std::vector<std::vector<double>> grad(np, std::vector<double>(nq));
    for (int k = 0; k < kFwMaxIterations; ++k) {
        // gradient: linear part plus forward differences of the continuation
        for (std::size_t j = 0; j < nq; ++j) {
            const double base = continuation(gamma, j, -1, 0.0);
            for (std::size_t i = 0; i < np; ++i) {
                const double bumped = continuation(gamma, j, static_cast<std::ptrdiff_t>(i), kFwGradStep);
                grad[i][j] = linear[i][j] + (bumped - base) / kFwGradStep;
            }
        }
        SmallOt lmo = transport_lp(m, col_target, grad);
        double gap = 0.0;
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < nq; ++j)
                gap += grad[i][j] * (gamma[i][j] - lmo.coupling[i][j]);
        ++fw_iterations_;
        if (gap < kFwGapTol) {
            std::vector<double> flat(np * nq);
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < nq; ++j) flat[i * nq + j] = gamma[i][j];
            warm_[cache_key] = {m_support, std::move(flat)};
            return current;
        }
        const double step = 2.0 / (k + 2.0);
        std::vector<std::vector<double>> candidate(np, std::vector<double>(nq));
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < nq; ++j)
                candidate[i][j] = gamma[i][j] + step * (lmo.coupling[i][j] - gamma[i][j]);
        const double candidate_value = objective(candidate);
        if (candidate_value <= current) {
            gamma = std::move(candidate);
            current = candidate_value;
        }
    }
    raise(Errc::NonConvergence, "Frank-Wolfe gap above 1e-6 after 10000 iterations");
}

double causal_dpp(const PathMeasure& mu, const PathMeasure& nu, const CostSpec& cost) {
    CausalDpp solver(mu, nu, cost);
    return solver.value();
}

bool cdf_dominance_check(const PathMeasure& mu, const PathMeasure& nu) {
    if (mu.num_stages() != 2 || nu.num_stages() != 2)
        raise(Errc::WrongStageCount, "dominance check is a two-stage diagnostic");
    std::vector<double> grid;
    for (const auto& atom : mu.atoms()) grid.push_back(atom.path[1]);
    for (const auto& atom : nu.atoms()) grid.push_back(atom.path[1]);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Distribution1D> mu_kernels;
    for (const auto& h : mu.histories(1)) mu_kernels.push_back(mu.conditional(h));
    for (const auto& h : nu.histories(1)) {
        const Distribution1D q = nu.conditional(h);
        for (double z : grid) {
            bool above = false, below = false;
            for (const auto& k : mu_kernels) {
                const double diff = k.cdf(z) - q.cdf(z);
                if (diff > tol::internal) above = true;
                if (diff < -tol::internal) below = true;
            }
            if (above && below) return false;
        }
    }
    return true;
}

}  // namespace causalot
