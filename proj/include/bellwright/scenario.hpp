#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellwright/models.hpp"

namespace bellwright {

// Batch input document for the CLI. Versioned; unknown fields are rejected
// so a scenario cannot silently carry options this build ignores.
struct Scenario {
  std::optional<std::array<double, 3>> angles;  // degrees
  std::optional<models::HiddenVariableModel> model;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> pairs;  // pair indices
  std::optional<std::uint64_t> denominator;
};

// `base_dir` resolves a relative model path inside the document.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir);

// "12,23,13" -> pair indices; throws ParseError on malformed entries.
std::vector<int> parse_pair_list(const std::string& csv);

// --model accepts a file path or an inline JSON object.
models::HiddenVariableModel load_model_arg(const std::string& arg);

}  // namespace bellwright
