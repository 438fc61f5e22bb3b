#include <cmath>

#include "causalot/ot1d.hpp"
#include "doctest.h"
#include "test_utils.hpp"

using namespace causalot;
using namespace causalot::testing;

namespace {

double coupling_cost(const Coupling1D& cells, const std::function<double(double)>& c) {
    double acc = 0.0;
    for (const auto& cell : cells) acc += cell.weight * c(cell.x - cell.y);
    return acc;
}

/// 1D transport through the LP solver, used as the exact reference.
double lp_reference(const Distribution1D& p, const Distribution1D& q,
                    const std::function<double(double, double)>& c) {
    std::vector<std::vector<double>> cost(p.size(), std::vector<double>(q.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) cost[i][j] = c(p.values()[i], q.values()[j]);
    LinearProgram lp;
    const std::size_t n = p.size() * q.size();
    lp.objective.resize(n);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) lp.objective[i * q.size() + j] = cost[i][j];
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 0; j < q.size(); ++j) row[i * q.size() + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(p.weights()[i]);
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) row[i * q.size() + j] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(q.weights()[j]);
    }
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    return sol.objective;
}

}  // namespace

TEST_CASE("monotone coupling") {
    SUBCASE("identity point mass") {
        const Distribution1D p = Distribution1D::from_atoms({{0.0, 1.0}});
        const Coupling1D cells = monotone_coupling(p, p);
        REQUIRE(cells.size() == 1);
        CHECK(cells[0].x == 0.0);
        CHECK(cells[0].y == 0.0);
        CHECK(cells[0].weight == 1.0);
    }
    SUBCASE("breakpoint merge example") {
        const Distribution1D p = Distribution1D::from_atoms({{1.0, 0.4}, {-1.0, 0.6}});
        const Distribution1D q = Distribution1D::from_atoms({{1.0, 0.5}, {-1.0, 0.5}});
        const Coupling1D cells = monotone_coupling(p, q);
        REQUIRE(cells.size() == 3);
        CHECK(cells[0].x == -1.0);
        CHECK(cells[0].y == -1.0);
        CHECK(cells[0].weight == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(cells[1].x == -1.0);
        CHECK(cells[1].y == 1.0);
        CHECK(cells[1].weight == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(cells[2].x == 1.0);
        CHECK(cells[2].y == 1.0);
        CHECK(cells[2].weight == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("matching halves couple diagonally") {
        const Distribution1D p = Distribution1D::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
        const Coupling1D cells = monotone_coupling(p, p);
        REQUIRE(cells.size() == 2);
        CHECK(cells[0].x == cells[0].y);
        CHECK(cells[1].x == cells[1].y);
    }
    SUBCASE("marginals exact and support monotone") {
        Rng rng(41);
        for (int trial = 0; trial < 50; ++trial) {
            const Distribution1D p = random_distribution(rng, 6);
            const Distribution1D q = random_distribution(rng, 6);
            const Coupling1D cells = monotone_coupling(p, q);
            std::map<double, double> px, qy;
            for (const auto& cell : cells) {
                px[cell.x] += cell.weight;
                qy[cell.y] += cell.weight;
            }
            for (std::size_t i = 0; i < p.size(); ++i)
                CHECK(std::abs(px.at(p.values()[i]) - p.weights()[i]) < 1e-12);
            for (std::size_t j = 0; j < q.size(); ++j)
                CHECK(std::abs(qy.at(q.values()[j]) - q.weights()[j]) < 1e-12);
            for (std::size_t a = 0; a < cells.size(); ++a)
                for (std::size_t b = a + 1; b < cells.size(); ++b) {
                    if (cells[a].x < cells[b].x) CHECK(cells[a].y <= cells[b].y);
                    if (cells[b].x < cells[a].x) CHECK(cells[b].y <= cells[a].y);
                }
        }
    }
}

TEST_CASE("one dimensional transport cost") {
    const auto square = [](double d) { return d * d; };
    SUBCASE("identical marginals cost nothing") {
        const Distribution1D p = Distribution1D::from_atoms({{2.0, 0.5}, {-2.0, 0.5}});
        CHECK(ot1d_cost(p, p, square) == doctest::Approx(0.0));
    }
    SUBCASE("pure translation") {
        const Distribution1D p = Distribution1D::from_atoms({{2.0, 0.5}, {-2.0, 0.5}});
        const Distribution1D q = Distribution1D::from_atoms({{3.0, 0.5}, {-1.0, 0.5}});
        CHECK(ot1d_cost(p, q, square) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("equals the LP optimum for convex costs") {
        Rng rng(43);
        for (int trial = 0; trial < 40; ++trial) {
            const Distribution1D p = random_distribution(rng, 4);
            const Distribution1D q = random_distribution(rng, 4);
            const double mono = ot1d_cost(p, q, square);
            const double lp = lp_reference(p, q, [](double x, double y) { return (x - y) * (x - y); });
            CHECK(std::abs(mono - lp) < 1e-9);
        }
    }
    SUBCASE("never beaten by random feasible couplings") {
        Rng rng(47);
        const auto abs_cost = [](double d) { return std::abs(d); };
        for (int trial = 0; trial < 5; ++trial) {
            const Distribution1D p = random_distribution(rng, 5);
            const Distribution1D q = random_distribution(rng, 5);
            for (const auto c : {std::function<double(double)>(square), std::function<double(double)>(abs_cost)}) {
                const double mono = ot1d_cost(p, q, c);
                for (int k = 0; k < 100; ++k) {
                    const auto gamma =
                        random_feasible_coupling(rng, p.weights(), q.weights());
                    double cost = 0.0;
                    for (std::size_t i = 0; i < p.size(); ++i)
                        for (std::size_t j = 0; j < q.size(); ++j)
                            cost += gamma[i][j] * c(p.values()[i] - q.values()[j]);
                    CHECK(mono <= cost + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("w1 by cdf difference") {
    SUBCASE("identical") {
        const Distribution1D p = Distribution1D::from_atoms({{0.0, 0.3}, {1.0, 0.7}});
        CHECK(w1(p, p) == doctest::Approx(0.0));
    }
    SUBCASE("point masses") {
        const Distribution1D a = Distribution1D::from_atoms({{-1.5, 1.0}});
        const Distribution1D b = Distribution1D::from_atoms({{2.25, 1.0}});
        CHECK(w1(a, b) == doctest::Approx(3.75).epsilon(1e-12));
    }
    SUBCASE("matches the monotone absolute cost and the LP") {
        Rng rng(53);
        for (int trial = 0; trial < 40; ++trial) {
            const Distribution1D p = random_distribution(rng, 5);
            const Distribution1D q = random_distribution(rng, 5);
            const double by_cdf = w1(p, q);
            CHECK(std::abs(by_cdf - ot1d_cost(p, q, [](double d) { return std::abs(d); })) < 1e-12);
            CHECK(std::abs(by_cdf -
                           lp_reference(p, q, [](double x, double y) { return std::abs(x - y); })) <
                  1e-9);
        }
    }
}

TEST_CASE("example coupling cost sanity") {
    // stage-1 cells of the running example, under the indicator of inequality
    const Distribution1D p = Distribution1D::from_atoms({{1.0, 0.4}, {-1.0, 0.6}});
    const Distribution1D q = Distribution1D::from_atoms({{1.0, 0.5}, {-1.0, 0.5}});
    CHECK(coupling_cost(monotone_coupling(p, q), [](double d) { return d == 0.0 ? 0.0 : 1.0; }) ==
          doctest::Approx(0.1).epsilon(1e-12));
}
