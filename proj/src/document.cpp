#include "causalot/document.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace causalot {

using nlohmann::json;

struct DocumentData {
    json root;
};

namespace {

[[noreturn]] void parse_fail(const std::string& what) { raise(Errc::ParseError, what); }

const json& expect(const json& node, const std::string& key) {
    const auto it = node.find(key);
    if (it == node.end()) parse_fail("missing key '" + key + "'");
    return *it;
}

std::vector<WeightedPath> read_atoms(const json& node, int stages, const std::string& key) {
    if (!node.is_array()) parse_fail("'" + key + ".atoms' must be a list");
    std::vector<WeightedPath> atoms;
    for (const auto& entry : node) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
            parse_fail("atom entries are [[path...], weight] in '" + key + "'");
        WeightedPath atom;
        atom.weight = entry[1].get<double>();
        for (const auto& coord : entry[0]) atom.path.push_back(coord.get<double>());
        if (static_cast<int>(atom.path.size()) != stages)
            parse_fail("atom path length disagrees with 'stages' in '" + key + "'");
        atoms.push_back(std::move(atom));
    }
    return atoms;
}

void validate(const json& root) {
    if (!root.is_object()) parse_fail("document root must be an object");
    const int version = expect(root, "version").get<int>();
    if (version != 1) parse_fail("unsupported document version " + std::to_string(version));
    const int stages = expect(root, "stages").get<int>();
    if (stages < 1) parse_fail("'stages' must be positive");
    for (const std::string key : {"mu", "nu"}) {
        if (!root.contains(key)) continue;
        const json& node = root.at(key);
        if (node.contains("atoms")) {
            PathMeasure::from_atoms(read_atoms(node.at("atoms"), stages, key));
        } else if (node.contains("histogram")) {
            const json& hist = node.at("histogram");
            if (!hist.is_array() || static_cast<int>(hist.size()) != stages)
                parse_fail("'" + key + ".histogram' needs one segment list per stage");
            for (const auto& stage : hist) {
                std::vector<HistogramSegment> segments;
                for (const auto& seg : stage) {
                    if (!seg.is_array() || seg.size() != 3)
                        parse_fail("histogram segments are [lo, hi, mass] in '" + key + "'");
                    segments.push_back({seg[0].get<double>(), seg[1].get<double>(),
                                        seg[2].get<double>()});
                }
                HistogramStage::from_segments(std::move(segments));
            }
        } else {
            parse_fail("'" + key + "' needs 'atoms' or 'histogram'");
        }
    }
    if (root.contains("cost")) {
        const std::string kind = expect(root.at("cost"), "kind").get<std::string>();
        const bool known = kind == "indicator_neq" || kind == "sq_euclidean_separable" ||
                           kind == "abs_separable" || kind == "increments_sq" || kind == "table";
        if (!known) parse_fail("unknown cost kind '" + kind + "'");
        if (kind == "table" && !root.at("cost").contains("values"))
            parse_fail("table cost needs 'values'");
    }
    if (root.contains("program")) {
        const json& prog = root.at("program");
        expect(prog, "lipschitz_r");
        const json& stage_list = expect(prog, "stages");
        if (!stage_list.is_array() || static_cast<int>(stage_list.size()) != stages)
            parse_fail("'program.stages' needs one entry per stage");
        for (const auto& stage : stage_list) {
            const json& control = expect(stage, "control");
            if (!control.contains("grid") && !control.contains("interval"))
                parse_fail("stage control needs 'grid' or 'interval'");
            const json& objective = expect(stage, "objective");
            if (!objective.contains("builtin") && !objective.contains("table"))
                parse_fail("stage objective needs 'builtin' or 'table'");
        }
    }
}

}  // namespace

Document Document::parse(const std::string& text) {
    Document doc;
    auto data = std::make_shared<DocumentData>();
    try {
        data->root = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(e.what());
    }
    validate(data->root);
    doc.data_ = std::move(data);
    return doc;
}

Document Document::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_fail("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string Document::serialize() const { return data_->root.dump(2) + "\n"; }

int Document::version() const { return data_->root.at("version").get<int>(); }

int Document::stages() const { return data_->root.at("stages").get<int>(); }

bool Document::has_measure(const std::string& key) const {
    return data_->root.contains(key) && data_->root.at(key).contains("atoms");
}

PathMeasure Document::measure(const std::string& key) const {
    if (!has_measure(key)) parse_fail("document has no atom measure '" + key + "'");
    return PathMeasure::from_atoms(read_atoms(data_->root.at(key).at("atoms"), stages(), key));
}

bool Document::has_histogram(const std::string& key) const {
    return data_->root.contains(key) && data_->root.at(key).contains("histogram");
}

HistogramProductMeasure Document::histogram(const std::string& key) const {
    if (!has_histogram(key)) parse_fail("document has no histogram measure '" + key + "'");
    HistogramProductMeasure measure;
    for (const auto& stage : data_->root.at(key).at("histogram")) {
        std::vector<HistogramSegment> segments;
        for (const auto& seg : stage)
            segments.push_back({seg[0].get<double>(), seg[1].get<double>(), seg[2].get<double>()});
        measure.stages.push_back(HistogramStage::from_segments(std::move(segments)));
    }
    return measure;
}

bool Document::has_cost() const { return data_->root.contains("cost"); }

std::string Document::cost_kind() const {
    if (!has_cost()) parse_fail("document has no cost");
    return data_->root.at("cost").at("kind").get<std::string>();
}

CostSpec Document::cost(const PathMeasure& mu, const PathMeasure& nu) const {
    const std::string kind = cost_kind();
    const int n = stages();
    if (kind == "indicator_neq") return CostSpec::indicator_neq();
    if (kind == "sq_euclidean_separable") return CostSpec::squared_separable(n);
    if (kind == "abs_separable") return CostSpec::abs_separable(n);
    if (kind == "increments_sq") return CostSpec::increments_squared(n);

    // table: values[i][j] over the sorted atoms of mu and nu
    const json& values = data_->root.at("cost").at("values");
    if (values.size() != mu.size()) parse_fail("cost table row count must match |mu|");
    auto table = std::make_shared<std::map<std::pair<Path, Path>, double>>();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (values[i].size() != nu.size()) parse_fail("cost table column count must match |nu|");
        for (std::size_t j = 0; j < nu.size(); ++j)
            (*table)[{mu.atoms()[i].path, nu.atoms()[j].path}] = values[i][j].get<double>();
    }
    return CostSpec::general([table](std::span<const double> x, std::span<const double> y) {
        const auto it = table->find({Path(x.begin(), x.end()), Path(y.begin(), y.end())});
        if (it == table->end()) raise(Errc::InvalidArgument, "path pair outside the cost table");
        return it->second;
    });
}

bool Document::has_program() const { return data_->root.contains("program"); }

StagewiseProgram Document::program() const {
    if (!has_program()) parse_fail("document has no program");
    const json& prog = data_->root.at("program");
    StagewiseProgram program;
    program.lipschitz_r = prog.at("lipschitz_r").get<double>();
    program.concave_in_x = prog.value("concave_in_x", false);
    int t = 0;
    for (const auto& stage_json : prog.at("stages")) {
        ProgramStage stage;
        stage.convex_in_u = stage_json.value("convex_in_u", false);
        const json& control = stage_json.at("control");
        if (control.contains("grid")) {
            ControlGrid grid;
            for (const auto& u : control.at("grid")) grid.points.push_back(u.get<double>());
            stage.control = std::move(grid);
        } else {
            const json& interval = control.at("interval");
            stage.control = ControlInterval{interval[0].get<double>(), interval[1].get<double>()};
        }
        const json& objective = stage_json.at("objective");
        const int coord = t;  // H_t reads the stage coordinate
        if (objective.contains("builtin")) {
            const std::string name = objective.at("builtin").get<std::string>();
            if (name == "abs_dev") {
                stage.objective = [coord](std::span<const double> prefix, double u) {
                    return std::abs(prefix[coord] - u);
                };
            } else if (name == "sq_dev") {
                stage.objective = [coord](std::span<const double> prefix, double u) {
                    const double d = prefix[coord] - u;
                    return d * d;
                };
            } else if (name == "neg_abs_plus_u_sq") {
                stage.objective = [coord](std::span<const double> prefix, double u) {
                    return -std::abs(prefix[coord]) + u * u;
                };
            } else {
                parse_fail("unknown builtin objective '" + name + "'");
            }
        } else {
            auto table = std::make_shared<std::map<std::pair<double, double>, double>>();
            for (const auto& entry : objective.at("table"))
                (*table)[{entry[0].get<double>(), entry[1].get<double>()}] = entry[2].get<double>();
            stage.objective = [table, coord](std::span<const double> prefix, double u) {
                const auto it = table->find({prefix[coord], u});
                if (it == table->end())
                    raise(Errc::InvalidArgument, "objective table has no entry for (x_t, u)");
                return it->second;
            };
        }
        program.stages.push_back(std::move(stage));
        ++t;
    }
    return program;
}

bool Document::operator==(const Document& other) const {
    return data_->root == other.data_->root;
}

Document Document::from_instance(int stages, const PathMeasure& mu, const PathMeasure& nu,
                                 const std::string& cost_kind) {
    json root;
    root["version"] = 1;
    root["stages"] = stages;
    auto atoms_json = [](const PathMeasure& m) {
        json list = json::array();
        for (const auto& atom : m.atoms()) list.push_back(json::array({atom.path, atom.weight}));
        return list;
    };
    root["mu"] = {{"atoms", atoms_json(mu)}};
    root["nu"] = {{"atoms", atoms_json(nu)}};
    if (!cost_kind.empty()) root["cost"] = {{"kind", cost_kind}};
    Document doc;
    auto data = std::make_shared<DocumentData>();
    data->root = std::move(root);
    validate(data->root);
    doc.data_ = std::move(data);
    return doc;
}

}  // namespace causalot
