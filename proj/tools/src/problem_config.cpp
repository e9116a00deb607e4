#include "basinlab/cli/problem_config.hpp"

#include "basinlab/benchmark_systems.hpp"
#include "basinlab/errors.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

namespace basinlab::cli {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

const json& member(const json& j, const std::string& where, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": expected a finite number");
    return v;
}

std::pair<double, double> interval(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
    const double lo = number(j[0], where + "[0]");
    const double hi = number(j[1], where + "[1]");
    if (!(lo < hi)) throw ConfigError(where + ": lo must be below hi");
    return {lo, hi};
}

AntoineForm parse_form(const json& j, const std::string& where) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "log10") return AntoineForm::log10;
    if (s == "ln") return AntoineForm::ln;
    throw ConfigError(where + ": expected \"log10\" or \"ln\"");
}

PressureUnit parse_unit(const json& j, const std::string& where) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    for (const PressureUnit u : {PressureUnit::kPa, PressureUnit::Pa, PressureUnit::bar, PressureUnit::mmHg,
                                 PressureUnit::atm})
        if (s == to_string(u)) return u;
    throw ConfigError(where + ": unknown pressure unit '" + s + "'");
}

}  // namespace

ProblemConfig parse_problem_config(const json& doc) {
    require_object(doc, "problem", {"description", "pressure_kPa", "antoine", "redlich_kister", "domain", "reference_roots"});
    ProblemConfig cfg;
    if (const auto it = doc.find("description"); it != doc.end()) {
        if (!it->is_string()) throw ConfigError("description: expected a string");
        cfg.description = it->get<std::string>();
    }
    cfg.params.pressure_kPa = number(member(doc, "problem", "pressure_kPa"), "pressure_kPa");

    const json& antoine = member(doc, "problem", "antoine");
    if (!antoine.is_array() || antoine.size() != 2) throw ConfigError("antoine: expected two entries");
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string where = "antoine[" + std::to_string(i) + "]";
        const json& a = antoine[i];
        require_object(a, where, {"A", "B", "C", "form", "unit", "offset"});
        auto& c = cfg.params.antoine[i];
        c.A = number(member(a, where, "A"), where + ".A");
        c.B = number(member(a, where, "B"), where + ".B");
        c.C = number(member(a, where, "C"), where + ".C");
        c.form = parse_form(member(a, where, "form"), where + ".form");
        c.unit = parse_unit(member(a, where, "unit"), where + ".unit");
        c.temperature_offset = a.contains("offset") ? number(a["offset"], where + ".offset") : 0.0;
    }

    const json& rk = member(doc, "problem", "redlich_kister");
    if (!rk.is_array() || rk.size() != 4) throw ConfigError("redlich_kister: expected four entries");
    for (std::size_t i = 0; i < 4; ++i) {
        const std::string where = "redlich_kister[" + std::to_string(i) + "]";
        require_object(rk[i], where, {"const", "inv"});
        cfg.params.redlich_kister[i].constant = number(member(rk[i], where, "const"), where + ".const");
        cfg.params.redlich_kister[i].inverse = rk[i].contains("inv") ? number(rk[i]["inv"], where + ".inv") : 0.0;
    }

    if (const auto it = doc.find("domain"); it != doc.end()) {
        require_object(*it, "domain", {"x1", "T"});
        cfg.domain = {interval(member(*it, "domain", "x1"), "domain.x1"), interval(member(*it, "domain", "T"), "domain.T")};
    }

    const json& roots = member(doc, "problem", "reference_roots");
    if (!roots.is_array()) throw ConfigError("reference_roots: expected an array");
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const std::string where = "reference_roots[" + std::to_string(i) + "]";
        if (!roots[i].is_array() || roots[i].size() != 2) throw ConfigError(where + ": expected [x1, T]");
        cfg.reference_roots.push_back(Vector{number(roots[i][0], where), number(roots[i][1], where)});
    }
    cfg.params.validate();
    return cfg;
}

ProblemConfig load_problem_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("problem file '" + path.string() + "': " + e.what());
    }
    return parse_problem_config(doc);
}

json to_json(const ProblemConfig& cfg) {
    json doc;
    if (!cfg.description.empty()) doc["description"] = cfg.description;
    doc["pressure_kPa"] = cfg.params.pressure_kPa;
    for (const auto& a : cfg.params.antoine)
        doc["antoine"].push_back({{"A", a.A},
                                  {"B", a.B},
                                  {"C", a.C},
                                  {"form", std::string(to_string(a.form))},
                                  {"unit", std::string(to_string(a.unit))},
                                  {"offset", a.temperature_offset}});
    for (const auto& t : cfg.params.redlich_kister) doc["redlich_kister"].push_back({{"const", t.constant}, {"inv", t.inverse}});
    doc["domain"] = {{"x1", {cfg.domain[0].first, cfg.domain[0].second}}, {"T", {cfg.domain[1].first, cfg.domain[1].second}}};
    doc["reference_roots"] = json::array();
    for (const auto& r : cfg.reference_roots) doc["reference_roots"].push_back({r[0], r[1]});
    return doc;
}

SystemModel make_system(const ProblemConfig& config) {
    return make_azeotrope_system(config.params, config.domain, config.reference_roots);
}

SystemModel resolve_problem(std::string_view name_or_path) {
    if (is_benchmark_system(name_or_path)) return benchmark_system(name_or_path);
    const std::filesystem::path path{std::string(name_or_path)};
    if (!std::filesystem::is_regular_file(path))
        throw ConfigError("--problem: '" + std::string(name_or_path) +
                          "' is neither a builtin system (cubic_roots, circle_hyperbola, affine) nor a readable file");
    return make_system(load_problem_config(path));
}

}  // namespace basinlab::cli
