#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "causalot/causal_ot.hpp"
#include "causalot/lp.hpp"
#include "causalot/measures.hpp"

namespace causalot::testing {

using Rng = std::mt19937;

/// Dyadic coordinate values keep atom deduplication exact.
inline double dyadic_value(Rng& rng, int lo = -8, int hi = 8) {
    std::uniform_int_distribution<int> quarter(lo, hi);
    return quarter(rng) / 4.0;
}

inline std::vector<double> distinct_values(Rng& rng, int count) {
    std::set<double> values;
    while (static_cast<int>(values.size()) < count) values.insert(dyadic_value(rng));
    return {values.begin(), values.end()};
}

inline std::vector<double> random_weights(Rng& rng, int count) {
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    std::vector<double> w(count);
    double total = 0.0;
    for (double& v : w) {
        v = unit(rng);
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

inline Distribution1D random_distribution(Rng& rng, int max_atoms) {
    std::uniform_int_distribution<int> size_dist(1, max_atoms);
    const int count = size_dist(rng);
    const auto values = distinct_values(rng, count);
    const auto weights = random_weights(rng, count);
    std::vector<std::pair<double, double>> atoms;
    for (int i = 0; i < count; ++i) atoms.emplace_back(values[i], weights[i]);
    return Distribution1D::from_atoms(std::move(atoms));
}

/// Random prefix tree with 1..max_branch children per node.
inline PathMeasure random_tree_measure(Rng& rng, int stages, int max_branch) {
    std::uniform_int_distribution<int> branch(1, max_branch);
    struct Node {
        Path prefix;
        double mass;
    };
    std::vector<Node> frontier{{Path{}, 1.0}};
    for (int t = 0; t < stages; ++t) {
        std::vector<Node> next;
        for (const auto& node : frontier) {
            const int children = branch(rng);
            const auto values = distinct_values(rng, children);
            const auto weights = random_weights(rng, children);
            for (int c = 0; c < children; ++c) {
                Node child{node.prefix, node.mass * weights[c]};
                child.prefix.push_back(values[c]);
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    std::vector<WeightedPath> atoms;
    atoms.reserve(frontier.size());
    for (auto& node : frontier) atoms.push_back({std::move(node.prefix), node.mass});
    return PathMeasure::from_atoms(std::move(atoms));
}

/// Product of independent stage marginals.
inline PathMeasure random_product_measure(Rng& rng, int stages, int max_states) {
    std::vector<Distribution1D> marginals;
    for (int t = 0; t < stages; ++t) marginals.push_back(random_distribution(rng, max_states));
    std::vector<WeightedPath> atoms{{Path{}, 1.0}};
    for (const auto& marginal : marginals) {
        std::vector<WeightedPath> grown;
        for (const auto& atom : atoms)
            for (std::size_t i = 0; i < marginal.size(); ++i) {
                WeightedPath next = atom;
                next.path.push_back(marginal.values()[i]);
                next.weight *= marginal.weights()[i];
                grown.push_back(std::move(next));
            }
        atoms = std::move(grown);
    }
    return PathMeasure::from_atoms(std::move(atoms));
}

/// Markov measure: one kernel per (stage, current value).
inline PathMeasure random_markov_measure(Rng& rng, int stages, int max_states) {
    const Distribution1D first = random_distribution(rng, max_states);
    std::vector<WeightedPath> atoms;
    for (std::size_t i = 0; i < first.size(); ++i)
        atoms.push_back({{first.values()[i]}, first.weights()[i]});
    for (int t = 1; t < stages; ++t) {
        std::map<double, Distribution1D> kernel;
        std::vector<WeightedPath> grown;
        for (const auto& atom : atoms) {
            const double last = atom.path.back();
            auto it = kernel.find(last);
            if (it == kernel.end()) it = kernel.emplace(last, random_distribution(rng, max_states)).first;
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                WeightedPath next = atom;
                next.path.push_back(it->second.values()[i]);
                next.weight *= it->second.weights()[i];
                grown.push_back(std::move(next));
            }
        }
        atoms = std::move(grown);
    }
    return PathMeasure::from_atoms(std::move(atoms));
}

/// Measure with independent increments: cumulative sums of a product law.
inline PathMeasure random_independent_increment_measure(Rng& rng, int stages, int max_states) {
    return cumulate(random_product_measure(rng, stages, max_states));
}

/// Random reweighting of (a subset of) mu's support; absolutely continuous.
inline PathMeasure random_reweighted(Rng& rng, const PathMeasure& mu, bool drop_atoms = true) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::bernoulli_distribution keep(0.8);
    std::vector<WeightedPath> atoms;
    for (const auto& atom : mu.atoms()) {
        if (drop_atoms && atoms.size() + 1 < mu.size() && !keep(rng)) continue;
        atoms.push_back({atom.path, unit(rng)});
    }
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.weight;
    for (auto& atom : atoms) atom.weight /= total;
    return PathMeasure::from_atoms(std::move(atoms));
}

/// Exhaustive vertex enumeration for the transportation polytope: every basis
/// of the (rank-deficient) equality system is solved directly. Exact oracle
/// for small instances.
inline double transport_vertex_enumeration(const std::vector<double>& p,
                                           const std::vector<double>& q,
                                           const std::vector<std::vector<double>>& cost) {
    const int np = static_cast<int>(p.size()), nq = static_cast<int>(q.size());
    const int n = np * nq;
    const int rank = np + nq - 1;
    // rows: np supply rows and the first nq-1 demand rows (the last is redundant)
    auto row_entry = [&](int r, int var) -> double {
        const int i = var / nq, j = var % nq;
        if (r < np) return r == i ? 1.0 : 0.0;
        return (r - np) == j ? 1.0 : 0.0;
    };
    std::vector<double> rhs(rank);
    for (int i = 0; i < np; ++i) rhs[i] = p[i];
    for (int j = 0; j + 1 < nq; ++j) rhs[np + j] = q[j];

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(rank);
    for (int i = 0; i < rank; ++i) pick[i] = i;
    while (true) {
        // solve the square system on the picked columns
        std::vector<std::vector<double>> a(rank, std::vector<double>(rank + 1, 0.0));
        for (int r = 0; r < rank; ++r) {
            for (int c = 0; c < rank; ++c) a[r][c] = row_entry(r, pick[c]);
            a[r][rank] = rhs[r];
        }
        bool singular = false;
        for (int col = 0; col < rank && !singular; ++col) {
            int piv = -1;
            double best_abs = 1e-9;
            for (int r = col; r < rank; ++r)
                if (std::abs(a[r][col]) > best_abs) {
                    best_abs = std::abs(a[r][col]);
                    piv = r;
                }
            if (piv < 0) {
                singular = true;
                break;
            }
            std::swap(a[col], a[piv]);
            for (int r = 0; r < rank; ++r) {
                if (r == col) continue;
                const double f = a[r][col] / a[col][col];
                if (f == 0.0) continue;
                for (int c = col; c <= rank; ++c) a[r][c] -= f * a[col][c];
            }
        }
        if (!singular) {
            bool feasible = true;
            double value = 0.0;
            for (int c = 0; c < rank && feasible; ++c) {
                const double x = a[c][rank] / a[c][c];
                if (x < -1e-9) feasible = false;
                value += cost[pick[c] / nq][pick[c] % nq] * std::max(0.0, x);
            }
            if (feasible) best = std::min(best, value);
        }
        // next combination
        int idx = rank - 1;
        while (idx >= 0 && pick[idx] == n - rank + idx) --idx;
        if (idx < 0) break;
        ++pick[idx];
        for (int k = idx + 1; k < rank; ++k) pick[k] = pick[k - 1] + 1;
    }
    return best;
}

/// Random vertex of the transport polytope by greedy filling along a random
/// cell order (north-west corner on shuffled indices).
inline std::vector<std::vector<double>> random_feasible_coupling(Rng& rng,
                                                                 const std::vector<double>& p,
                                                                 const std::vector<double>& q) {
    std::vector<int> rows(p.size()), cols(q.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<double> supply = p, demand = q;
    std::vector<std::vector<double>> gamma(p.size(), std::vector<double>(q.size(), 0.0));
    std::size_t i = 0, j = 0;
    while (i < rows.size() && j < cols.size()) {
        const double move = std::min(supply[rows[i]], demand[cols[j]]);
        gamma[rows[i]][cols[j]] = move;
        supply[rows[i]] -= move;
        demand[cols[j]] -= move;
        if (supply[rows[i]] <= demand[cols[j]])
            ++i;
        else
            ++j;
    }
    return gamma;
}

/// Small helpers shared by the golden-value tests.
PathMeasure example_6_1_mu();
PathMeasure example_6_1_nu();
PathMeasure example_6_2_mu();
PathMeasure example_6_2_nu();
PathMeasure example_6_3_mu(const std::vector<double>& a);
PathMeasure example_6_3_nu(const std::vector<double>& a);
TransportPlan example_6_1_causal_plan();
TransportPlan example_6_1_bicausal_plan();
TransportPlan example_6_3_monge_plan(const std::vector<double>& a);

}  // namespace causalot::testing
