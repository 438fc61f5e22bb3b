#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalot {

/// A path is one trajectory of a discrete-time real-valued process.
using Path = std::vector<double>;

/// Tolerance hierarchy used throughout: user-facing input slack,
/// solver residuals / golden values, and internal structural identities.
namespace tol {
inline constexpr double input = 1e-9;
inline constexpr double solver = 1e-9;
inline constexpr double internal = 1e-12;
}  // namespace tol

enum class Errc {
    EmptySupport,
    UnnormalizedWeights,
    RaggedPaths,
    StageOutOfRange,
    NotAbsolutelyContinuous,
    MarginalMismatch,
    NotCausal,
    NotMarkov,
    NotSemiseparable,
    StageLimitExceeded,
    NonConvergence,
    WrongMode,
    WrongStageCount,
    NotProduct,
    ParameterOutOfRange,
    UnboundedBelow,
    NumericalBreakdown,
    ParseError,
    InvalidArgument,
};

const char* errc_name(Errc code);

/// Library error carrying a machine-checkable code and a human message.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) { throw Error(code, message); }

/// Lexicographic comparison used for canonical atom ordering.
struct PathLess {
    bool operator()(const Path& a, const Path& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

}  // namespace causalot
