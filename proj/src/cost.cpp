#include "causalot/cost.hpp"

#include <cmath>

namespace causalot {

CostSpec CostSpec::general(GeneralFn f) {
    CostSpec c;
    c.kind_ = Kind::General;
    c.general_ = std::move(f);
    return c;
}

CostSpec CostSpec::semiseparable(std::vector<SemiFn> stages) {
    CostSpec c;
    c.kind_ = Kind::Semiseparable;
    c.num_stages_ = static_cast<int>(stages.size());
    c.semi_stages_ = std::move(stages);
    return c;
}

CostSpec CostSpec::separable(std::vector<PairFn> stages, bool convex_difference) {
    CostSpec c;
    c.kind_ = Kind::Separable;
    c.num_stages_ = static_cast<int>(stages.size());
    c.pair_stages_ = std::move(stages);
    c.convex_difference_ = convex_difference;
    return c;
}

CostSpec CostSpec::increment_separable(std::vector<PairFn> stages, bool convex_difference) {
    CostSpec c;
    c.kind_ = Kind::IncrementSeparable;
    c.num_stages_ = static_cast<int>(stages.size());
    c.pair_stages_ = std::move(stages);
    c.convex_difference_ = convex_difference;
    return c;
}

CostSpec CostSpec::indicator_neq() {
    return general([](std::span<const double> x, std::span<const double> y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != y[i]) return 1.0;
        return 0.0;
    });
}

CostSpec CostSpec::squared_separable(int num_stages) {
    std::vector<PairFn> stages(num_stages,
                               [](double a, double b) { return (a - b) * (a - b); });
    return separable(std::move(stages), true);
}

CostSpec CostSpec::abs_separable(int num_stages) {
    std::vector<PairFn> stages(num_stages, [](double a, double b) { return std::abs(a - b); });
    return separable(std::move(stages), true);
}

CostSpec CostSpec::pth_power_separable(int num_stages, double p) {
    std::vector<PairFn> stages(num_stages,
                               [p](double a, double b) { return std::pow(std::abs(a - b), p); });
    return separable(std::move(stages), true);
}

CostSpec CostSpec::increments_squared(int num_stages) {
    std::vector<PairFn> stages(num_stages,
                               [](double a, double b) { return (a - b) * (a - b); });
    return increment_separable(std::move(stages), true);
}

double CostSpec::evaluate(std::span<const double> x, std::span<const double> y) const {
    switch (kind_) {
        case Kind::General:
            return general_(x, y);
        case Kind::Semiseparable: {
            double acc = 0.0;
            for (std::size_t t = 0; t < x.size(); ++t)
                acc += semi_stages_[t](x[t], y.subspan(0, t + 1));
            return acc;
        }
        case Kind::Separable: {
            double acc = 0.0;
            for (std::size_t t = 0; t < x.size(); ++t) acc += pair_stages_[t](x[t], y[t]);
            return acc;
        }
        case Kind::IncrementSeparable: {
            double acc = pair_stages_[0](x[0], y[0]);
            for (std::size_t t = 1; t < x.size(); ++t)
                acc += pair_stages_[t](x[t] - x[t - 1], y[t] - y[t - 1]);
            return acc;
        }
    }
    raise(Errc::InvalidArgument, "unreachable cost kind");
}

double CostSpec::stage_term(int t, double x_t, std::span<const double> y_prefix) const {
    switch (kind_) {
        case Kind::Semiseparable:
            return semi_stages_[t - 1](x_t, y_prefix);
        case Kind::Separable:
            return pair_stages_[t - 1](x_t, y_prefix.back());
        default:
            raise(Errc::NotSemiseparable, "stage term requires a (semi)separable cost");
    }
}

double CostSpec::increment_term(int t, double dx, double dy) const {
    if (kind_ != Kind::IncrementSeparable)
        raise(Errc::InvalidArgument, "increment term requires an increment-separable cost");
    return pair_stages_[t - 1](dx, dy);
}

}  // namespace causalot
