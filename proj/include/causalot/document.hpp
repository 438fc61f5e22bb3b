#pragma once

#include <memory>
#include <optional>
#include <string>

#include "causalot/knothe.hpp"
#include "causalot/programs.hpp"

namespace causalot {

struct DocumentData;

/// Versioned instance document: measures (atoms or histogram stages), an
/// optional cost and an optional program, as structured key-value text.
/// Parsing validates eagerly and reports position-anchored diagnostics;
/// serialization uses full round-trip numeric precision.
class Document {
  public:
    static Document parse(const std::string& text);
    static Document load_file(const std::string& path);

    std::string serialize() const;

    int version() const;
    int stages() const;

    bool has_measure(const std::string& key) const;
    PathMeasure measure(const std::string& key) const;

    bool has_histogram(const std::string& key) const;
    HistogramProductMeasure histogram(const std::string& key) const;

    bool has_cost() const;
    /// A table cost is resolved against the sorted atom order of the given
    /// measures; builtin kinds ignore the arguments beyond the stage count.
    CostSpec cost(const PathMeasure& mu, const PathMeasure& nu) const;
    std::string cost_kind() const;

    bool has_program() const;
    StagewiseProgram program() const;

    bool operator==(const Document& other) const;

    /// Assembles an atom-measure document (used by the fixture generator).
    static Document from_instance(int stages, const PathMeasure& mu, const PathMeasure& nu,
                                  const std::string& cost_kind);

  private:
    std::shared_ptr<const DocumentData> data_;
};

}  // namespace causalot
