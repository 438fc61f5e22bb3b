#include "causalot/measures.hpp"

#include "causalot/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace causalot {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::EmptySupport: return "EmptySupport";
        case Errc::UnnormalizedWeights: return "UnnormalizedWeights";
        case Errc::RaggedPaths: return "RaggedPaths";
        case Errc::StageOutOfRange: return "StageOutOfRange";
        case Errc::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
        case Errc::MarginalMismatch: return "MarginalMismatch";
        case Errc::NotCausal: return "NotCausal";
        case Errc::NotMarkov: return "NotMarkov";
        case Errc::NotSemiseparable: return "NotSemiseparable";
        case Errc::StageLimitExceeded: return "StageLimitExceeded";
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::WrongMode: return "WrongMode";
        case Errc::WrongStageCount: return "WrongStageCount";
        case Errc::NotProduct: return "NotProduct";
        case Errc::ParameterOutOfRange: return "ParameterOutOfRange";
        case Errc::UnboundedBelow: return "UnboundedBelow";
        case Errc::NumericalBreakdown: return "NumericalBreakdown";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

Distribution1D Distribution1D::from_atoms(std::vector<std::pair<double, double>> atoms) {
    std::sort(atoms.begin(), atoms.end());
    Distribution1D d;
    double total = 0.0;
    for (const auto& [value, weight] : atoms) {
        if (weight <= 0.0) {
            if (weight < 0.0) raise(Errc::InvalidArgument, "negative weight in 1d distribution");
            continue;
        }
        total += weight;
        if (!d.values_.empty() && d.values_.back() == value) {
            d.weights_.back() += weight;
        } else {
            d.values_.push_back(value);
            d.weights_.push_back(weight);
        }
    }
    if (d.values_.empty()) raise(Errc::EmptySupport, "1d distribution without positive mass");
    if (std::abs(total - 1.0) > tol::input)
        raise(Errc::UnnormalizedWeights, "1d weights sum to " + std::to_string(total));
    return d;
}

double Distribution1D::cdf(double z) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > z) break;
        acc += weights_[i];
    }
    return acc;
}

double Distribution1D::quantile(double u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        acc += weights_[i];
        if (acc >= u) return values_[i];
    }
    return values_.back();
}

double Distribution1D::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * weights_[i];
    return acc;
}

const Distribution1D& StageKernel::at(const Path& history) const {
    auto it = table.find(history);
    if (it == table.end()) raise(Errc::InvalidArgument, "kernel queried at zero-mass history");
    return it->second;
}

PathMeasure PathMeasure::from_atoms(std::vector<WeightedPath> raw_atoms) {
    std::erase_if(raw_atoms, [](const WeightedPath& a) { return a.weight == 0.0; });
    if (raw_atoms.empty()) raise(Errc::EmptySupport, "measure without positive mass");
    const std::size_t n = raw_atoms.front().path.size();
    if (n == 0) raise(Errc::RaggedPaths, "zero-length paths");
    double total = 0.0;
    for (const auto& atom : raw_atoms) {
        if (atom.path.size() != n)
            raise(Errc::RaggedPaths, "paths of lengths " + std::to_string(n) + " and " +
                                         std::to_string(atom.path.size()));
        if (atom.weight < 0.0) raise(Errc::InvalidArgument, "negative atom weight");
        total += atom.weight;
    }
    if (std::abs(total - 1.0) > tol::input)
        raise(Errc::UnnormalizedWeights, "weights sum to " + std::to_string(total));

    std::sort(raw_atoms.begin(), raw_atoms.end(), [](const WeightedPath& a, const WeightedPath& b) {
        return PathLess{}(a.path, b.path);
    });
    PathMeasure m;
    m.num_stages_ = static_cast<int>(n);
    for (auto& atom : raw_atoms) {
        if (!m.atoms_.empty() && m.atoms_.back().path == atom.path)
            m.atoms_.back().weight += atom.weight;
        else
            m.atoms_.push_back(std::move(atom));
    }
    return m;
}

namespace {

bool starts_with(const Path& path, std::span<const double> prefix) {
    if (prefix.size() > path.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (path[i] != prefix[i]) return false;
    return true;
}

}  // namespace

double PathMeasure::prefix_mass(std::span<const double> prefix) const {
    double acc = 0.0;
    for (const auto& atom : atoms_)
        if (starts_with(atom.path, prefix)) acc += atom.weight;
    return acc;
}

double PathMeasure::mass_of(const Path& path) const {
    for (const auto& atom : atoms_)
        if (atom.path == path) return atom.weight;
    return 0.0;
}

PathMeasure PathMeasure::prefix_marginal(int stages) const {
    if (stages < 1 || stages > num_stages_) raise(Errc::StageOutOfRange, "prefix_marginal stage");
    std::vector<WeightedPath> projected;
    projected.reserve(atoms_.size());
    for (const auto& atom : atoms_)
        projected.push_back({Path(atom.path.begin(), atom.path.begin() + stages), atom.weight});
    return from_atoms(std::move(projected));
}

Distribution1D PathMeasure::stage_marginal(int stage) const {
    if (stage < 1 || stage > num_stages_) raise(Errc::StageOutOfRange, "stage_marginal stage");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& atom : atoms_) atoms.emplace_back(atom.path[stage - 1], atom.weight);
    return Distribution1D::from_atoms(std::move(atoms));
}

std::vector<Path> PathMeasure::histories(int stage) const {
    if (stage < 0 || stage > num_stages_) raise(Errc::StageOutOfRange, "histories stage");
    if (stage == 0) return {Path{}};
    // atoms are sorted lexicographically, so equal prefixes are adjacent
    std::vector<Path> result;
    for (const auto& atom : atoms_) {
        Path prefix(atom.path.begin(), atom.path.begin() + stage);
        if (result.empty() || result.back() != prefix) result.push_back(std::move(prefix));
    }
    return result;
}

Distribution1D PathMeasure::conditional(std::span<const double> history) const {
    const int t = static_cast<int>(history.size());
    if (t < 0 || t >= num_stages_) raise(Errc::StageOutOfRange, "conditional history length");
    const double denom = prefix_mass(history);
    if (denom <= 0.0) raise(Errc::InvalidArgument, "conditional at zero-mass history");
    std::vector<std::pair<double, double>> atoms;
    for (const auto& atom : atoms_)
        if (starts_with(atom.path, history)) atoms.emplace_back(atom.path[t], atom.weight / denom);
    return Distribution1D::from_atoms(std::move(atoms));
}

std::pair<PathMeasure, StageKernel> disintegrate(const PathMeasure& m, int t) {
    if (t < 1 || t >= m.num_stages()) raise(Errc::StageOutOfRange, "disintegrate requires 1 <= t <= N-1");
    StageKernel kernel;
    kernel.stage = t;
    for (const auto& history : m.histories(t)) kernel.table.emplace(history, m.conditional(history));
    return {m.prefix_marginal(t), std::move(kernel)};
}

namespace {

bool same_distribution(const Distribution1D& a, const Distribution1D& b, double eps) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.values()[i] != b.values()[i]) return false;
        if (std::abs(a.weights()[i] - b.weights()[i]) > eps) return false;
    }
    return true;
}

bool kernels_product(const PathMeasure& m) {
    for (int t = 1; t < m.num_stages(); ++t) {
        auto histories = m.histories(t);
        const Distribution1D first = m.conditional(histories.front());
        for (std::size_t i = 1; i < histories.size(); ++i)
            if (!same_distribution(first, m.conditional(histories[i]), tol::internal)) return false;
    }
    return true;
}

}  // namespace

StructureFlags structure_flags(const PathMeasure& m) {
    StructureFlags flags;
    flags.is_markov = true;
    for (int t = 1; t < m.num_stages() && flags.is_markov; ++t) {
        // group histories by last coordinate; all kernels within a group must agree
        std::map<double, Distribution1D> representative;
        for (const auto& history : m.histories(t)) {
            Distribution1D cond = m.conditional(history);
            auto [it, inserted] = representative.emplace(history.back(), cond);
            if (!inserted && !same_distribution(it->second, cond, tol::internal)) {
                flags.is_markov = false;
                break;
            }
        }
    }
    flags.is_product = kernels_product(m);
    flags.has_independent_increments = kernels_product(increments(m));
    return flags;
}

PathMeasure increments(const PathMeasure& m) {
    std::vector<WeightedPath> atoms;
    atoms.reserve(m.size());
    for (const auto& atom : m.atoms()) {
        Path delta(atom.path.size());
        delta[0] = atom.path[0];
        for (std::size_t i = 1; i < atom.path.size(); ++i)
            delta[i] = atom.path[i] - atom.path[i - 1];
        atoms.push_back({std::move(delta), atom.weight});
    }
    return PathMeasure::from_atoms(std::move(atoms));
}

PathMeasure cumulate(const PathMeasure& m) {
    std::vector<WeightedPath> atoms;
    atoms.reserve(m.size());
    for (const auto& atom : m.atoms()) {
        Path path(atom.path.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < atom.path.size(); ++i) {
            acc += atom.path[i];
            path[i] = acc;
        }
        atoms.push_back({std::move(path), atom.weight});
    }
    return PathMeasure::from_atoms(std::move(atoms));
}

double relative_entropy(const PathMeasure& nu, const PathMeasure& mu) {
    if (nu.num_stages() != mu.num_stages())
        raise(Errc::WrongStageCount, "entropy between measures of different lengths");
    double acc = 0.0;
    for (const auto& atom : nu.atoms()) {
        const double mu_mass = mu.mass_of(atom.path);
        if (mu_mass <= 0.0) return std::numeric_limits<double>::infinity();
        acc += atom.weight * std::log(atom.weight / mu_mass);
    }
    return acc;
}

std::vector<double> entropy_chain(const PathMeasure& nu, const PathMeasure& mu) {
    if (nu.num_stages() != mu.num_stages())
        raise(Errc::WrongStageCount, "entropy between measures of different lengths");
    for (const auto& atom : nu.atoms())
        if (mu.mass_of(atom.path) <= 0.0)
            raise(Errc::NotAbsolutelyContinuous, "nu has an atom outside supp(mu)");

    const int n = nu.num_stages();
    std::vector<double> terms(n, 0.0);
    auto entropy_1d = [](const Distribution1D& p, const Distribution1D& q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::size_t j = 0;
            double qw = 0.0;
            for (; j < q.size(); ++j)
                if (q.values()[j] == p.values()[i]) {
                    qw = q.weights()[j];
                    break;
                }
            acc += p.weights()[i] * std::log(p.weights()[i] / qw);
        }
        return acc;
    };
    terms[0] = entropy_1d(nu.stage_marginal(1), mu.stage_marginal(1));
    for (int t = 1; t < n; ++t) {
        double acc = 0.0;
        for (const auto& history : nu.histories(t)) {
            const double mass = nu.prefix_mass(history);
            acc += mass * entropy_1d(nu.conditional(history), mu.conditional(history));
        }
        terms[t] = acc;
    }
    return terms;
}

double lip_constant(const PathMeasure& mu) {
    double best = 0.0;
    for (int t = 1; t < mu.num_stages(); ++t) {
        const auto histories = mu.histories(t);
        std::vector<Distribution1D> kernels;
        kernels.reserve(histories.size());
        for (const auto& h : histories) kernels.push_back(mu.conditional(h));
        for (std::size_t i = 0; i < histories.size(); ++i) {
            for (std::size_t j = i + 1; j < histories.size(); ++j) {
                double dist = 0.0;
                for (std::size_t k = 0; k < histories[i].size(); ++k)
                    dist += std::abs(histories[i][k] - histories[j][k]);
                if (dist <= 0.0) continue;
                best = std::max(best, w1(kernels[i], kernels[j]) / dist);
            }
        }
    }
    return best;
}

std::vector<double> exp_constants(const PathMeasure& mu, const std::vector<double>& a) {
    const int n = mu.num_stages();
    if (static_cast<int>(a.size()) != n) raise(Errc::InvalidArgument, "need one a_t per stage");
    for (double at : a)
        if (!(at > 0.0)) raise(Errc::InvalidArgument, "a_t must be positive");
    std::vector<double> lambda(n, -std::numeric_limits<double>::infinity());
    for (int t = 1; t <= n; ++t) {
        for (const auto& history : mu.histories(t - 1)) {
            const Distribution1D cond =
                (t == 1) ? mu.stage_marginal(1) : mu.conditional(history);
            // log sum_i w_i exp(a_t x_i^2), stabilized by the max exponent
            double peak = -std::numeric_limits<double>::infinity();
            for (double v : cond.values()) peak = std::max(peak, a[t - 1] * v * v);
            double acc = 0.0;
            for (std::size_t i = 0; i < cond.size(); ++i)
                acc += cond.weights()[i] * std::exp(a[t - 1] * cond.values()[i] * cond.values()[i] - peak);
            lambda[t - 1] = std::max(lambda[t - 1], peak + std::log(acc));
        }
    }
    return lambda;
}

double InequalityConstants::aggregate(const std::vector<double>& a, const std::vector<double>& lambda,
                                      double lipschitz) {
    const int n = static_cast<int>(a.size());
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        acc += std::pow(1.0 + lipschitz, 2.0 * j) * (1.0 + lambda[n - 1 - j]) / (a[n - 1 - j] * a[n - 1 - j]);
    return std::sqrt(2.0 * acc);
}

}  // namespace causalot
