#pragma once

#include <functional>
#include <span>
#include <vector>

#include "causalot/common.hpp"

namespace causalot {

/// Structural cost description. The solver only needs evaluate(); the DPP
/// and KR layers additionally exploit the declared structure.
///
/// Kinds:
///   General            c(x_1..x_N, y_1..y_N)
///   Semiseparable      sum_t c_t(x_t, y_1..y_t)
///   Separable          sum_t c_t(x_t, y_t)
///   IncrementSeparable c_1(x_1,y_1) + sum_{t>1} c_t(x_t-x_{t-1}, y_t-y_{t-1})
class CostSpec {
  public:
    enum class Kind { General, Semiseparable, Separable, IncrementSeparable };

    using GeneralFn = std::function<double(std::span<const double>, std::span<const double>)>;
    using PairFn = std::function<double(double, double)>;
    using SemiFn = std::function<double(double, std::span<const double>)>;

    static CostSpec general(GeneralFn f);
    static CostSpec semiseparable(std::vector<SemiFn> stages);
    static CostSpec separable(std::vector<PairFn> stages, bool convex_difference = false);
    static CostSpec increment_separable(std::vector<PairFn> stages, bool convex_difference = false);

    /// 1 if the paths differ anywhere, 0 otherwise.
    static CostSpec indicator_neq();
    /// sum_t (x_t - y_t)^2
    static CostSpec squared_separable(int num_stages);
    /// sum_t |x_t - y_t|
    static CostSpec abs_separable(int num_stages);
    /// sum_t |x_t - y_t|^p
    static CostSpec pth_power_separable(int num_stages, double p);
    /// (x_1 - y_1)^2 + sum_{t>1} ((x_t - x_{t-1}) - (y_t - y_{t-1]))^2
    static CostSpec increments_squared(int num_stages);

    Kind kind() const { return kind_; }
    int num_stages() const { return num_stages_; }

    /// Declared (not verified) convexity of each stage cost as a function of
    /// the coordinate difference.
    bool convex_difference() const { return convex_difference_; }

    double evaluate(std::span<const double> x, std::span<const double> y) const;

    bool is_semiseparable() const {
        return kind_ == Kind::Semiseparable || kind_ == Kind::Separable;
    }

    /// Stage term c_t(x_t, y_1..y_t) for semiseparable/separable costs,
    /// t in 1..N. Throws NotSemiseparable otherwise.
    double stage_term(int t, double x_t, std::span<const double> y_prefix) const;

    /// Stage term of an increment-separable cost: c_1(x_1, y_1) for t = 1,
    /// c_t(dx, dy) on the increments for t > 1.
    double increment_term(int t, double dx, double dy) const;

  private:
    Kind kind_ = Kind::General;
    int num_stages_ = 0;  // 0 = any
    bool convex_difference_ = false;
    GeneralFn general_;
    std::vector<PairFn> pair_stages_;
    std::vector<SemiFn> semi_stages_;
};

}  // namespace causalot
