#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellwright/models.hpp"
#include "bellwright/types.hpp"

namespace bellwright::simulate {

struct RunConfig {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint32_t substreams = 1;
  // Hide the cause-assignment log to mimic laboratory access; empirical
  // no-conspiracy checks need the log and refuse to run without it.
  bool blind = false;
};

inline constexpr int kOutcomeCells = 5;  // ++, +-, -+, --, incomplete
inline constexpr int kIncompleteCell = 4;

struct FrequencyTable {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint32_t substreams = 1;
  bool blind = false;

  // joint occurrences of cause assignment and setting pair (oracle log)
  std::array<std::array<std::uint64_t, kNumPairs>, models::kNumAssignments> cause_pair{};
  std::array<std::array<std::uint64_t, kOutcomeCells>, kNumPairs> pair_outcome{};

  std::uint64_t pair_total(int pair_idx) const;
  std::uint64_t assignment_total(int assignment) const;

  void write_csv(std::ostream& os, double confidence = 0.99) const;
  nlohmann::json to_json(double confidence = 0.99) const;
};

// Samples trials t ~ (assignment ~ cause_dist, pair ~ policy[assignment],
// outcomes by the response rule). Deterministic for a fixed
// (trials, seed, substreams); substreams run in parallel when OpenMP is
// available. run_reference is the serial implementation kept as the
// ground truth the parallel kernel must match bit for bit.
FrequencyTable run(const models::HiddenVariableModel& m, const RunConfig& cfg);
FrequencyTable run_reference(const models::HiddenVariableModel& m, const RunConfig& cfg);

enum class IntervalMethod { Normal, ClopperPearson };

struct Estimate {
  double point = 0;
  double lo = 0;
  double hi = 0;
  double half_width = 0;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
};

// Conditional estimate count/total with a two-sided interval at the given
// confidence. Throws EmptySubensemble when total is 0.
Estimate estimate_counts(std::uint64_t count, std::uint64_t total,
                         double confidence = 0.99,
                         IntervalMethod method = IntervalMethod::Normal);

Estimate estimate(const FrequencyTable& t, int pair_idx, int outcome_cell,
                  double confidence = 0.99,
                  IntervalMethod method = IntervalMethod::Normal);

enum class EmpiricalVerdict { Satisfied, Violated, Inconclusive };

std::string verdict_name(EmpiricalVerdict v);

struct EmpiricalBell {
  Estimate p12, p23, p13;
  double slack = 0;
  double half_width = 0;  // conservative: sum of the three half-widths
  EmpiricalVerdict verdict = EmpiricalVerdict::Inconclusive;
};

EmpiricalBell empirical_bell(const FrequencyTable& t, double confidence = 0.99,
                             IntervalMethod method = IntervalMethod::Normal);

struct EmpiricalNoConsEntry {
  std::string conjunction;
  int pair_idx = 0;
  int literal_count = 0;
  double conditional = 0;
  double marginal = 0;
  double delta = 0;
  double threshold = 0;
  bool flagged = false;
};

struct EmpiricalNoConsReport {
  std::vector<EmpiricalNoConsEntry> checks;
  bool any_flagged() const;
  std::vector<EmpiricalNoConsEntry> flags() const;
};

// Flags |p(phi|pair) - p(phi)| beyond the summed confidence half-widths for
// every literal conjunction of cause atoms. Expect a small false-positive
// rate at the configured confidence on genuinely independent policies.
EmpiricalNoConsReport empirical_no_cons(const FrequencyTable& t,
                                        double confidence = 0.99);

// Inverse standard normal CDF.
double normal_quantile(double p);

// Number of worker threads the parallel kernels may use; honors the
// BELLWRIGHT_THREADS environment variable as an upper cap.
int effective_threads();

}  // namespace bellwright::simulate
