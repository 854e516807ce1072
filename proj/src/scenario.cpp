#include "bellwright/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bellwright/errors.hpp"

namespace bellwright {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

std::string dir_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

}  // namespace

std::vector<int> parse_pair_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.size() != 2 || token[0] < '1' || token[0] > '3' || token[1] < '1' ||
        token[1] > '3') {
      throw ParseError("pair must be two digits in 1..3, got: " + token);
    }
    int idx = pair_index(token[0] - '0', token[1] - '0');
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  if (out.empty()) throw ParseError("empty pair list");
  return out;
}

models::HiddenVariableModel load_model_arg(const std::string& arg) {
  std::string trimmed = arg;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\n"));
  if (!trimmed.empty() && trimmed.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(arg);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("inline model: ") + e.what());
    }
    return models::model_from_json(j);
  }
  return models::model_from_json(parse_json_file(arg));
}

Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  const std::vector<std::string> allowed = {"version", "angles", "model",   "trials",
                                            "seed",    "pairs",  "denominator"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ParseError("unknown scenario field: " + it.key());
    }
  }
  if (!j.contains("version") || j.at("version") != 1) {
    throw ParseError("scenario requires version 1");
  }

  Scenario s;
  if (j.contains("angles")) {
    const auto& a = j.at("angles");
    if (!a.is_array() || a.size() != 3) throw ParseError("angles must be 3 numbers");
    s.angles = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.is_string()) {
      std::string path = m.get<std::string>();
      if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
      s.model = models::model_from_json(parse_json_file(path));
    } else {
      s.model = models::model_from_json(m);
    }
  }
  if (j.contains("trials")) s.trials = j.at("trials").get<std::uint64_t>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("pairs")) {
    std::vector<int> pairs;
    for (const auto& entry : j.at("pairs")) {
      std::string name = entry.get<std::string>();
      auto parsed = parse_pair_list(name);
      pairs.insert(pairs.end(), parsed.begin(), parsed.end());
    }
    s.pairs = pairs;
  }
  if (j.contains("denominator")) {
    s.denominator = j.at("denominator").get<std::uint64_t>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(parse_json_file(path), dir_of(path));
}

}  // namespace bellwright
