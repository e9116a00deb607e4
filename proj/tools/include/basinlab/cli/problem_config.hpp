#pragma once

// Problem files for the azeotrope model.
//
// {
//   "description": "free text (optional)",
//   "pressure_kPa": 35.0,
//   "antoine": [ {"A", "B", "C", "form": "log10"|"ln",
//                 "unit": "kPa"|"Pa"|"bar"|"mmHg"|"atm", "offset"} x 2 ],
//   "redlich_kister": [ {"const", "inv"} x 4 ],
//   "domain": {"x1": [lo, hi], "T": [lo, hi]},          (optional)
//   "reference_roots": [[x1, T], ...]
// }
//
// Unknown keys are rejected at every level.

#include "basinlab/azeotrope.hpp"
#include "basinlab/system.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace basinlab::cli {

struct ProblemConfig {
    std::string description;
    AzeotropeParams params;
    std::vector<std::pair<double, double>> domain = default_azeotrope_domain();
    std::vector<Vector> reference_roots;
};

/// Throws ConfigError naming the offending key.
[[nodiscard]] ProblemConfig parse_problem_config(const nlohmann::json& doc);
[[nodiscard]] ProblemConfig load_problem_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const ProblemConfig& config);

[[nodiscard]] SystemModel make_system(const ProblemConfig& config);

/// A builtin benchmark name or a path to a problem file.
[[nodiscard]] SystemModel resolve_problem(std::string_view name_or_path);

}  // namespace basinlab::cli
