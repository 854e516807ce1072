// Batch front door: scenario files or flags in, verdicts, tables and scan
// curves out. Exit codes are a contract: 0 = affirmative/satisfied,
// 2 = negative/violated/infeasible, 3 = indeterminate/inconclusive,
// 1 = usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bellwright/derivation.hpp"
#include "bellwright/errors.hpp"
#include "bellwright/feasibility.hpp"
#include "bellwright/models.hpp"
#include "bellwright/quantum.hpp"
#include "bellwright/scan.hpp"
#include "bellwright/scenario.hpp"
#include "bellwright/simulate.hpp"

namespace bw = bellwright;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;
constexpr int kExitIndeterminate = 3;

struct CommonArgs {
  std::string scenario_path;
  std::string angles_csv;
  std::string model_arg;
  std::string pairs_csv;
  std::string out_path;
  std::string format = "table";
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint32_t substreams = 1;
  std::uint64_t denominator = 1000000;
  double confidence = 0.99;
  bool blind = false;
  bool exact_intervals = false;
};

std::array<double, 3> parse_angles(const std::string& csv) {
  std::array<double, 3> out{};
  std::stringstream ss(csv);
  std::string token;
  int k = 0;
  while (std::getline(ss, token, ',')) {
    if (k >= 3) throw bw::ParseError("expected exactly three angles");
    try {
      out[static_cast<std::size_t>(k)] = std::stod(token);
    } catch (const std::exception&) {
      throw bw::ParseError("malformed angle: " + token);
    }
    ++k;
  }
  if (k != 3) throw bw::ParseError("expected exactly three angles");
  return out;
}

// Folds the scenario file (when given) under the explicit flags and resolves
// the statistics source.
struct ResolvedInput {
  std::optional<std::array<double, 3>> angles;
  std::optional<bw::models::HiddenVariableModel> model;
  std::optional<std::vector<int>> pairs;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t denominator = 1000000;
};

ResolvedInput resolve(const CommonArgs& args) {
  ResolvedInput in;
  if (!args.scenario_path.empty()) {
    bw::Scenario s = bw::load_scenario(args.scenario_path);
    in.angles = s.angles;
    in.model = s.model;
    in.pairs = s.pairs;
    if (s.trials) in.trials = *s.trials;
    if (s.seed) in.seed = *s.seed;
    if (s.denominator) in.denominator = *s.denominator;
  }
  if (!args.angles_csv.empty()) in.angles = parse_angles(args.angles_csv);
  if (!args.model_arg.empty()) in.model = bw::load_model_arg(args.model_arg);
  if (!args.pairs_csv.empty()) in.pairs = bw::parse_pair_list(args.pairs_csv);
  if (args.trials != 0) in.trials = args.trials;
  if (args.seed != 0) in.seed = args.seed;
  if (args.denominator != 1000000) in.denominator = args.denominator;
  return in;
}

bw::quantum::DirectionConfig config_of(const std::array<double, 3>& a) {
  return bw::quantum::DirectionConfig::from_degrees(a[0], a[1], a[2]);
}

void require_one_source(const ResolvedInput& in) {
  if (in.angles && in.model) {
    throw bw::ParseError("give either --angles (quantum source) or --model, not both");
  }
  if (!in.angles && !in.model) {
    throw bw::ParseError("a statistics source is required: --angles or --model");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw bw::Error("cannot write " + path);
  return out;
}

// --- predict ---

int run_predict(const CommonArgs& args) {
  ResolvedInput in = resolve(args);
  if (!in.angles) throw bw::ParseError("predict needs --angles");
  auto cfg = config_of(*in.angles);
  auto targets = bw::quantum::quantum_targets(cfg, in.denominator);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.out_path.empty()) {
    file = open_out(args.out_path);
    os = &file;
  }

  if (args.format == "csv") {
    *os << "i,j,phi_deg,pp,pm,mp,mm\n";
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        *os << i << "," << j << "," << bw::format_number(cfg.pair_angle_deg(i, j));
        for (int cell = 0; cell < 4; ++cell) {
          bw::Outcome a = cell < 2 ? bw::Outcome::Plus : bw::Outcome::Minus;
          bw::Outcome b = (cell % 2 == 0) ? bw::Outcome::Plus : bw::Outcome::Minus;
          *os << "," << bw::format_number(bw::quantum::joint_prob(cfg, i, j, a, b));
        }
        *os << "\n";
      }
    }
  } else if (args.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        nlohmann::json row;
        row["i"] = i;
        row["j"] = j;
        row["phi_deg"] = cfg.pair_angle_deg(i, j);
        row["pp"] = bw::quantum::joint_prob(cfg, i, j, bw::Outcome::Plus, bw::Outcome::Plus);
        row["pm"] = bw::quantum::joint_prob(cfg, i, j, bw::Outcome::Plus, bw::Outcome::Minus);
        row["mp"] = bw::quantum::joint_prob(cfg, i, j, bw::Outcome::Minus, bw::Outcome::Plus);
        row["mm"] = bw::quantum::joint_prob(cfg, i, j, bw::Outcome::Minus, bw::Outcome::Minus);
        const auto& entry = targets.at(i, j, bw::Outcome::Plus, bw::Outcome::Plus);
        if (entry.radius == 0) row["pp_exact"] = bw::format_rational(entry.value);
        rows.push_back(std::move(row));
      }
    }
    *os << rows.dump(2) << "\n";
  } else {
    *os << "pair  phi      p(++)  p(+-)  p(-+)  p(--)\n";
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        *os << i << j << "    " << bw::format_number(cfg.pair_angle_deg(i, j), 2);
        for (int cell = 0; cell < 4; ++cell) {
          bw::Outcome a = cell < 2 ? bw::Outcome::Plus : bw::Outcome::Minus;
          bw::Outcome b = (cell % 2 == 0) ? bw::Outcome::Plus : bw::Outcome::Minus;
          *os << "  " << bw::format_number(bw::quantum::joint_prob(cfg, i, j, a, b), 6);
          const auto& entry = targets.at(i, j, a, b);
          if (entry.radius == 0) *os << " (" << bw::format_rational(entry.value) << ")";
        }
        *os << "\n";
      }
    }
    *os << "marginals: every wing outcome has probability 0.5 at every setting pair\n";
  }
  return kExitOk;
}

// --- bell ---

struct BellValues {
  double p13, p12, p23;
  std::optional<bw::Rational> e13, e12, e23;  // exact values when available
};

BellValues bell_values(const ResolvedInput& in) {
  BellValues v{};
  if (in.angles) {
    auto cfg = config_of(*in.angles);
    v.p13 = bw::quantum::joint_prob(cfg, 1, 3, bw::Outcome::Plus, bw::Outcome::Plus);
    v.p12 = bw::quantum::joint_prob(cfg, 1, 2, bw::Outcome::Plus, bw::Outcome::Plus);
    v.p23 = bw::quantum::joint_prob(cfg, 2, 3, bw::Outcome::Plus, bw::Outcome::Plus);
    v.e13 = bw::quantum::exact_joint_prob(cfg, 1, 3, bw::Outcome::Plus, bw::Outcome::Plus);
    v.e12 = bw::quantum::exact_joint_prob(cfg, 1, 2, bw::Outcome::Plus, bw::Outcome::Plus);
    v.e23 = bw::quantum::exact_joint_prob(cfg, 2, 3, bw::Outcome::Plus, bw::Outcome::Plus);
  } else {
    auto stats = bw::models::predicted_conditionals(*in.model);
    v.e13 = stats.at(1, 3, bw::Outcome::Plus, bw::Outcome::Plus).value;
    v.e12 = stats.at(1, 2, bw::Outcome::Plus, bw::Outcome::Plus).value;
    v.e23 = stats.at(2, 3, bw::Outcome::Plus, bw::Outcome::Plus).value;
    v.p13 = v.e13->get_d();
    v.p12 = v.e12->get_d();
    v.p23 = v.e23->get_d();
  }
  return v;
}

std::string with_exact(double value, const std::optional<bw::Rational>& exact) {
  std::string s = bw::format_number(value);
  if (exact) s += " (" + bw::format_rational(*exact) + ")";
  return s;
}

int run_bell(const CommonArgs& args) {
  ResolvedInput in = resolve(args);
  require_one_source(in);
  BellValues v = bell_values(in);

  std::cout << "p13=" << with_exact(v.p13, v.e13) << " p12=" << with_exact(v.p12, v.e12)
            << " p23=" << with_exact(v.p23, v.e23) << "\n";
  if (v.e13 && v.e12 && v.e23) {
    auto exact = bw::derivation::bell_check(*v.e13, *v.e12, *v.e23);
    std::cout << (exact.satisfied ? "SATISFIED" : "VIOLATED")
              << " slack=" << bw::format_number(exact.slack.get_d()) << " ("
              << bw::format_rational(exact.slack) << ")\n";
    return exact.satisfied ? kExitOk : kExitNegative;
  }
  auto check = bw::derivation::bell_check(v.p13, v.p12, v.p23);
  std::cout << (check.satisfied ? "SATISFIED" : "VIOLATED")
            << " slack=" << bw::format_number(check.slack) << "\n";
  return check.satisfied ? kExitOk : kExitNegative;
}

// --- scan ---

int run_scan(const CommonArgs& args, double lo, double hi, double step) {
  auto result = bw::wigner_scan(lo, hi, step);

  std::ostream* os = &std::cout;
  std::ofstream file;
  bool csv_on_stdout = args.out_path.empty();
  if (!csv_on_stdout) {
    file = open_out(args.out_path);
    os = &file;
  }
  *os << "theta,p13,p12,p23,slack\n";
  for (const auto& row : result.rows) {
    *os << bw::format_number(row.theta_deg) << "," << bw::format_number(row.p13) << ","
        << bw::format_number(row.p12) << "," << bw::format_number(row.p23) << ","
        << bw::format_number(row.slack) << "\n";
  }
  const auto& best = result.rows[result.argmin];
  std::ostream& summary = csv_on_stdout ? std::cerr : std::cout;
  summary << "min slack=" << bw::format_number(best.slack)
          << " at theta=" << bw::format_number(best.theta_deg) << "\n";
  return kExitOk;
}

// --- feasibility ---

int run_feasibility(const CommonArgs& args) {
  ResolvedInput in = resolve(args);
  require_one_source(in);
  bw::TargetStatistics targets;
  if (in.angles) {
    targets = bw::quantum::quantum_targets(config_of(*in.angles), in.denominator);
  } else {
    targets = bw::models::predicted_conditionals(*in.model);
  }
  auto problem = bw::feasibility::encode(targets, in.pairs.value_or(std::vector<int>{}));
  auto result = bw::feasibility::solve(problem);
  bw::feasibility::verify_certificate(result, problem);

  std::string out_path =
      args.out_path.empty() ? std::string("feasibility_result.json") : args.out_path;
  auto file = open_out(out_path);
  file << bw::feasibility::result_to_json(result, problem).dump(2) << "\n";

  using bw::feasibility::Verdict;
  switch (result.verdict) {
    case Verdict::Feasible:
      std::cout << "FEASIBLE witness written to " << out_path << "\n";
      return kExitOk;
    case Verdict::Infeasible:
      std::cout << "INFEASIBLE certificate="
                << result.certificate->named_form.value_or("farkas")
                << " violation=" << bw::format_rational(result.certificate->violation)
                << " written to " << out_path << "\n";
      return kExitNegative;
    case Verdict::Indeterminate:
      std::cout << "INDETERMINATE violation="
                << bw::format_rational(result.certificate->violation)
                << " within rounding bound "
                << bw::format_rational(result.certificate->epsilon_bound) << ", see "
                << out_path << "\n";
      return kExitIndeterminate;
  }
  return kExitError;
}

// --- simulate ---

int run_simulate(const CommonArgs& args) {
  ResolvedInput in = resolve(args);
  if (in.angles && !in.model) {
    std::cerr << "simulate needs a model: quantum statistics violating the inequality "
                 "have no separate-common-cause model to sample from (that is the "
                 "point of the feasibility verdicts)\n";
    return kExitError;
  }
  if (!in.model) throw bw::ParseError("simulate needs --model");
  if (in.trials == 0) throw bw::ParseError("simulate needs --trials");

  bw::simulate::RunConfig cfg;
  cfg.trials = in.trials;
  cfg.seed = in.seed;
  cfg.substreams = args.substreams;
  cfg.blind = args.blind;
  auto table = bw::simulate::run(*in.model, cfg);
  auto method = args.exact_intervals ? bw::simulate::IntervalMethod::ClopperPearson
                                     : bw::simulate::IntervalMethod::Normal;

  bool file_out = !args.out_path.empty();
  std::ofstream file;
  if (file_out) file = open_out(args.out_path);

  if (args.format == "json") {
    nlohmann::json j = table.to_json(args.confidence);
    (file_out ? file : std::cout) << j.dump(2) << "\n";
  } else {
    table.write_csv(file_out ? file : std::cout, args.confidence);
  }

  std::ostream& report = file_out ? std::cout : std::cerr;
  int exit_code = kExitOk;
  try {
    auto bell = bw::simulate::empirical_bell(table, args.confidence, method);
    report << "bell: " << bw::simulate::verdict_name(bell.verdict)
           << " slack=" << bw::format_number(bell.slack) << " +-"
           << bw::format_number(bell.half_width) << "\n";
    if (bell.verdict == bw::simulate::EmpiricalVerdict::Violated) {
      exit_code = kExitNegative;
    } else if (bell.verdict == bw::simulate::EmpiricalVerdict::Inconclusive) {
      exit_code = kExitIndeterminate;
    }
  } catch (const bw::EmptySubensemble&) {
    report << "bell: inconclusive (a required setting pair has no samples)\n";
    exit_code = kExitIndeterminate;
  }

  if (!cfg.blind) {
    auto no_cons = bw::simulate::empirical_no_cons(table, args.confidence);
    auto flags = no_cons.flags();
    report << "no-conspiracy: " << flags.size() << " of " << no_cons.checks.size()
           << " checks flagged\n";
    for (const auto& flag : flags) {
      report << "  " << flag.conjunction << " vs pair "
             << bw::pair_name(bw::pair_from_index(flag.pair_idx))
             << ": delta=" << bw::format_number(flag.delta)
             << " threshold=" << bw::format_number(flag.threshold) << "\n";
    }
  }
  return exit_code;
}

// --- derive ---

int run_derive(const CommonArgs& args) {
  ResolvedInput in = resolve(args);
  if (!in.model) throw bw::ParseError("derive needs --model");
  auto report = bw::derivation::run_derivation(*in.model);

  if (args.format == "json") {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    for (const auto& step : report.steps) {
      std::cout << step.key;
      for (std::size_t pad = step.key.size(); pad < 6; ++pad) std::cout << ' ';
      std::cout << " [" << bw::derivation::step_status_name(step.status) << "] "
                << step.title << "\n";
      for (const auto& note : step.notes) std::cout << "        " << note << "\n";
    }
    if (report.slack) {
      std::cout << "slack=" << bw::format_rational(*report.slack) << "\n";
    }
    std::cout << (report.all_proven() ? "ALL STEPS PROVEN" : "CHAIN INCOMPLETE") << "\n";
  }
  return report.all_proven() ? kExitOk : kExitNegative;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "scenario JSON file");
  cmd->add_option("--angles", args.angles_csv, "three directions in degrees, e.g. 0,60,120");
  cmd->add_option("--model", args.model_arg, "model JSON file path or inline JSON");
  cmd->add_option("--pairs", args.pairs_csv, "setting pair selection, e.g. 12,23,13");
  cmd->add_option("--denominator", args.denominator,
                  "rounding denominator for non-exact quantum targets");
  cmd->add_option("--out", args.out_path, "output file");
  cmd->add_option("--format", args.format, "output format: table, csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separate-common-cause analysis of the EPR-Bohm experiment"};
  app.require_subcommand(1);

  CommonArgs args;
  double scan_lo = 0.1, scan_hi = 179.9, scan_step = 0.1;

  CLI::App* predict = app.add_subcommand("predict", "print the 9x4 outcome table");
  add_common(predict, args);
  CLI::App* bell = app.add_subcommand("bell", "evaluate the triangle inequality");
  add_common(bell, args);
  CLI::App* scan = app.add_subcommand("scan", "slack curve over configs (0,theta,2theta)");
  add_common(scan, args);
  scan->add_option("--lo", scan_lo, "grid start in degrees (above 0)");
  scan->add_option("--hi", scan_hi, "grid end in degrees (below 180)");
  scan->add_option("--step", scan_step, "grid step in degrees");
  CLI::App* feas = app.add_subcommand("feasibility",
                                      "decide whether a separate-common-cause model fits");
  add_common(feas, args);
  CLI::App* simulate = app.add_subcommand("simulate", "seeded Monte Carlo run");
  add_common(simulate, args);
  simulate->add_option("--trials", args.trials, "number of trials");
  simulate->add_option("--seed", args.seed, "64-bit seed");
  simulate->add_option("--substreams", args.substreams, "parallel substream count");
  simulate->add_option("--confidence", args.confidence, "interval confidence (default 0.99)");
  simulate->add_flag("--blind", args.blind, "hide the cause-assignment log");
  simulate->add_flag("--exact-intervals", args.exact_intervals,
                     "Clopper-Pearson instead of the normal approximation");
  CLI::App* derive = app.add_subcommand("derive", "machine-check the derivation chain");
  add_common(derive, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitError;
  }

  try {
    if (predict->parsed()) return run_predict(args);
    if (bell->parsed()) return run_bell(args);
    if (scan->parsed()) return run_scan(args, scan_lo, scan_hi, scan_step);
    if (feas->parsed()) return run_feasibility(args);
    if (simulate->parsed()) return run_simulate(args);
    if (derive->parsed()) return run_derive(args);
  } catch (const bw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
