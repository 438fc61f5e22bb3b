#include "causalot/programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalot/ot1d.hpp"

namespace causalot {

namespace {

constexpr double kGoldenTol = 1e-8;

/// Minimizes a univariate function on [lo, hi] by golden-section search.
double golden_section(const std::function<double(double)>& f, double lo, double hi) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > kGoldenTol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

struct NodeOptimum {
    double value;
    double control;
};

NodeOptimum minimize_stage(const ProgramStage& stage, std::span<const double> prefix,
                           double support_lo, double support_hi) {
    auto f = [&](double u) { return stage.objective(prefix, u); };
    if (const auto* grid = std::get_if<ControlGrid>(&stage.control)) {
        if (grid->points.empty()) raise(Errc::InvalidArgument, "empty control grid");
        NodeOptimum best{f(grid->points.front()), grid->points.front()};
        for (double u : grid->points) {
            const double v = f(u);
            if (v < best.value) best = {v, u};
        }
        return best;
    }
    const auto& interval = std::get<ControlInterval>(stage.control);
    // clamp infinite ends to a window around the data; a boundary optimum on
    // an infinite side then signals an unbounded program
    const double span = std::max(1.0, support_hi - support_lo);
    const double lo =
        std::isfinite(interval.lo) ? interval.lo : support_lo - 10.0 * span;
    const double hi = std::isfinite(interval.hi) ? interval.hi : support_hi + 10.0 * span;
    if (!(hi > lo)) raise(Errc::InvalidArgument, "empty control interval");

    // coarse scan, then golden-section refinement around the best bracket
    const int scan_points = stage.convex_in_u ? 9 : 129;
    int best_idx = 0;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> us(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        us[i] = lo + (hi - lo) * i / (scan_points - 1);
        const double v = f(us[i]);
        if (v < best_value) {
            best_value = v;
            best_idx = i;
        }
    }
    double refined_u = us[best_idx];
    double refined_v = best_value;
    if (stage.convex_in_u) {
        const double a = us[std::max(0, best_idx - 1)];
        const double b = us[std::min(scan_points - 1, best_idx + 1)];
        const double u = golden_section(f, a, b);
        const double v = f(u);
        if (v < refined_v) {
            refined_v = v;
            refined_u = u;
        }
    }
    const bool at_lo = best_idx == 0 && !std::isfinite(interval.lo);
    const bool at_hi = best_idx == scan_points - 1 && !std::isfinite(interval.hi);
    if (at_lo || at_hi)
        raise(Errc::UnboundedBelow, "optimal control sits on an unbounded interval end");
    return {refined_v, refined_u};
}

}  // namespace

ProgramValue eval_program(const PathMeasure& eta, const StagewiseProgram& prog) {
    if (prog.num_stages() != eta.num_stages())
        raise(Errc::WrongStageCount, "program and measure stage counts differ");
    double support_lo = std::numeric_limits<double>::infinity();
    double support_hi = -std::numeric_limits<double>::infinity();
    for (const auto& atom : eta.atoms())
        for (double v : atom.path) {
            support_lo = std::min(support_lo, v);
            support_hi = std::max(support_hi, v);
        }

    ProgramValue result;
    for (int t = 1; t <= eta.num_stages(); ++t) {
        for (const auto& node : eta.histories(t)) {
            const NodeOptimum opt =
                minimize_stage(prog.stages[t - 1], node, support_lo, support_hi);
            result.value += eta.prefix_mass(node) * opt.value;
            result.controls.emplace_back(node, opt.control);
        }
    }
    return result;
}

DiscrepancyReport discrepancy_bound_check(const PathMeasure& mu, const PathMeasure& nu,
                                          const StagewiseProgram& prog) {
    DiscrepancyReport report;
    report.lhs = std::abs(eval_program(mu, prog).value - eval_program(nu, prog).value);
    const CostSpec l1 = CostSpec::abs_separable(mu.num_stages());
    report.w1_bicausal = solve(mu, nu, l1, Mode::Bicausal).value;
    report.rhs = prog.lipschitz_r * report.w1_bicausal;
    const InequalityReport info = transport_info_report(mu, nu);
    report.entropy_rhs = prog.lipschitz_r * info.bound;
    report.ok = report.lhs <= report.rhs + tol::input;
    return report;
}

InequalityReport transport_info_report(const PathMeasure& mu, const PathMeasure& nu,
                                       const std::optional<std::vector<double>>& a) {
    InequalityReport report;
    report.w1_bc = solve(mu, nu, CostSpec::abs_separable(mu.num_stages()), Mode::Bicausal).value;
    report.entropy = relative_entropy(nu, mu);

    const int n = mu.num_stages();
    if (a) {
        if (static_cast<int>(a->size()) != n)
            raise(Errc::InvalidArgument, "need one a_t per stage");
        report.constants.a = *a;
        report.constants.lambda = exp_constants(mu, *a);
    } else {
        // per-stage grid search over a_t = 2^-4 .. 2^4 minimizing (1+lambda)/a^2
        report.constants.a.assign(n, 1.0);
        report.constants.lambda.assign(n, 0.0);
        for (int exponent = -4; exponent <= 4; ++exponent) {
            const double candidate = std::pow(2.0, exponent);
            const std::vector<double> lambda =
                exp_constants(mu, std::vector<double>(n, candidate));
            for (int t = 0; t < n; ++t) {
                const double score = (1.0 + lambda[t]) / (candidate * candidate);
                const double incumbent = (1.0 + report.constants.lambda[t]) /
                                         (report.constants.a[t] * report.constants.a[t]);
                if (exponent == -4 || score < incumbent) {
                    report.constants.a[t] = candidate;
                    report.constants.lambda[t] = lambda[t];
                }
            }
        }
    }
    report.constants.lipschitz = lip_constant(mu);
    report.constants.k = InequalityConstants::aggregate(
        report.constants.a, report.constants.lambda, report.constants.lipschitz);

    if (std::isinf(report.entropy)) {
        report.bound = std::numeric_limits<double>::infinity();
        report.slack = std::numeric_limits<double>::infinity();
        report.holds = true;
    } else {
        report.bound = report.constants.k * std::sqrt(std::max(0.0, report.entropy));
        report.slack = report.bound - report.w1_bc;
        report.holds = report.slack >= -tol::input;
    }
    return report;
}

PathMeasure lex_interpolate(const PathMeasure& mu, const PathMeasure& nu, double t) {
    if (!(t >= 0.0 && t <= 1.0)) raise(Errc::ParameterOutOfRange, "interpolation needs t in [0,1]");
    const TransportPlan plan = kr_coupling(mu, nu);
    std::vector<WeightedPath> atoms;
    atoms.reserve(plan.size());
    for (const auto& atom : plan.atoms()) {
        Path mid(atom.x.size());
        for (std::size_t i = 0; i < mid.size(); ++i)
            mid[i] = (1.0 - t) * atom.x[i] + t * atom.y[i];
        atoms.push_back({std::move(mid), atom.weight});
    }
    return PathMeasure::from_atoms(std::move(atoms));
}

std::vector<double> speed_profile(const PathMeasure& mu, const PathMeasure& nu, double p,
                                  const std::vector<double>& grid) {
    if (p < 1.0) raise(Errc::ParameterOutOfRange, "exponent p must be >= 1");
    if (!structure_flags(mu).is_product)
        raise(Errc::NotProduct, "constant-speed scaling needs product mu");
    const CostSpec cost = CostSpec::pth_power_separable(mu.num_stages(), p);
    std::vector<double> values;
    values.reserve(grid.size());
    for (double t : grid)
        values.push_back(solve(mu, lex_interpolate(mu, nu, t), cost, Mode::Bicausal).value);
    return values;
}

ConcavityProfile concavity_profile(const StagewiseProgram& prog, const PathMeasure& mu,
                                   const PathMeasure& nu, const std::vector<double>& grid) {
    ConcavityProfile profile;
    profile.ts = grid;
    bool convex_controls = true;
    for (const auto& stage : prog.stages) convex_controls = convex_controls && stage.convex_in_u;
    profile.hypotheses_ok =
        prog.concave_in_x && convex_controls && structure_flags(mu).is_product;
    for (double t : grid) profile.values.push_back(eval_program(lex_interpolate(mu, nu, t), prog).value);
    return profile;
}

TensorizationReport tensorization_identity_check(const PathMeasure& mu, const PathMeasure& nu) {
    if (mu.num_stages() != 2 || nu.num_stages() != 2)
        raise(Errc::WrongStageCount, "tensorization identity is a two-stage check");
    if (!structure_flags(mu).is_product)
        raise(Errc::NotProduct, "tensorization identity needs product mu");

    TensorizationReport report;
    report.lhs = solve(mu, nu, CostSpec::squared_separable(2), Mode::Bicausal).value;

    const auto square = [](double d) { return d * d; };
    const Distribution1D mu1 = mu.stage_marginal(1);
    const Distribution1D mu2 = mu.stage_marginal(2);
    const Distribution1D nu1 = nu.stage_marginal(1);
    report.rhs = ot1d_cost(mu1, nu1, square);
    for (const auto& h : nu.histories(1))
        report.rhs += nu.prefix_mass(h) * ot1d_cost(mu2, nu.conditional(h), square);
    report.equal = std::abs(report.lhs - report.rhs) < 1e-8;

    report.entropy_total = relative_entropy(nu, mu);
    if (std::isinf(report.entropy_total)) {
        report.entropy_chain_sum = report.entropy_total;
        report.entropy_equal = true;  // both sides infinite
    } else {
        double acc = 0.0;
        for (double term : entropy_chain(nu, mu)) acc += term;
        report.entropy_chain_sum = acc;
        report.entropy_equal = std::abs(report.entropy_total - acc) < 1e-10;
    }
    return report;
}

}  // namespace causalot
