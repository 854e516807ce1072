#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellwright/rational.hpp"
#include "bellwright/space.hpp"
#include "bellwright/targets.hpp"
#include "bellwright/types.hpp"

namespace bellwright::models {

inline constexpr int kNumAssignments = 8;

// Truth values for the three cause event types C11, C22, C33. Index bit k
// holds the value of C_{k+1,k+1}.
struct CauseAssignment {
  bool c11 = false;
  bool c22 = false;
  bool c33 = false;

  static CauseAssignment from_index(int idx) {
    return CauseAssignment{(idx & 1) != 0, (idx & 2) != 0, (idx & 4) != 0};
  }
  int index() const { return (c11 ? 1 : 0) | (c22 ? 2 : 0) | (c33 ? 4 : 0); }

  bool cause(int i) const { return i == 1 ? c11 : (i == 2 ? c22 : c33); }

  std::string to_string() const;                       // e.g. "TTF"
  static CauseAssignment parse(const std::string& s);  // throws ParseError
};

// Distribution over the 9 setting pairs, optionally conditioned on the cause
// assignment. Conspiratorial policies (assignment-dependent rows) are
// representable on purpose so the no-conspiracy check has something to catch.
class SettingPolicy {
 public:
  static SettingPolicy uniform();
  static SettingPolicy independent(const std::array<Rational, kNumPairs>& row);
  static SettingPolicy conditional(
      const std::array<std::array<Rational, kNumPairs>, kNumAssignments>& rows);

  const Rational& prob(int pair_idx, int assignment) const {
    return rows_[static_cast<std::size_t>(assignment)][static_cast<std::size_t>(pair_idx)];
  }

  bool is_independent() const;
  void validate() const;  // throws InvalidModel

 private:
  // rows_[assignment][pair]
  std::array<std::array<Rational, kNumPairs>, kNumAssignments> rows_;
};

// Outcome emitted by one wing; empty optional models a defective response
// that produces no outcome at all (the checks are expected to catch it).
struct ResponseOutcome {
  std::optional<Outcome> left;
  std::optional<Outcome> right;
};

using ResponseTable = std::array<std::array<ResponseOutcome, kNumPairs>, kNumAssignments>;

class ResponseRule {
 public:
  // The left wing answers + exactly when C_ii holds, the right wing answers +
  // exactly when C_jj fails.
  static ResponseRule mth();
  static ResponseRule table(ResponseTable t);
  static ResponseTable mth_as_table();

  bool is_mth() const { return mth_; }
  const ResponseTable& outcomes() const { return table_; }

  ResponseOutcome respond(const CauseAssignment& c, SettingPair s) const;

 private:
  bool mth_ = true;
  ResponseTable table_{};
};

struct HiddenVariableModel {
  std::array<Rational, kNumAssignments> cause_dist{};
  SettingPolicy policy = SettingPolicy::uniform();
  ResponseRule response = ResponseRule::mth();

  void validate() const;  // throws InvalidModel
};

// Realizes the model as one finite probability space with atoms
// (assignment x setting pair) and extensions for every standard event name
// (settings, outcomes, causes and cause complements). Outcomes only appear
// together with their setting, so NOWM holds by construction here.
FiniteProbabilitySpace model_to_space(const HiddenVariableModel& m);

// p_ij(a,b) over the induced space, exact. Throws ZeroConditioning if some
// setting pair has probability zero.
TargetStatistics predicted_conditionals(const HiddenVariableModel& m);

// --- no conspiracy ---

// Boolean combination of cause atoms, carried both as an 8-bit mask over the
// assignments and as a printable label. literal_count > 0 marks plain
// conjunctions of literals; 0 marks a full-sweep extension.
struct CauseConjunction {
  std::string label;
  unsigned mask = 0;
  int literal_count = 0;

  bool contains(int assignment) const { return (mask >> assignment) & 1u; }
  EventExpr expr() const;
};

// Every conjunction of up to 3 cause literals (26 of them); with full_sweep
// also all 256 extensions over the 8 assignments.
std::vector<CauseConjunction> cause_conjunctions(bool full_sweep = false);

struct NoConsEntry {
  std::string conjunction;
  int pair_idx = 0;
  Rational conditional;  // p(phi | L_i & R_j)
  Rational marginal;     // p(phi)
  Rational delta;
  bool violated = false;
  int literal_count = 0;  // 0 for full-sweep extensions
};

struct NoConsReport {
  std::vector<NoConsEntry> checks;
  bool ok() const;
  std::vector<NoConsEntry> violations() const;
};

// Tests statistical independence of cause-atom combinations from the setting
// pairs. Always covers every conjunction of up to 3 cause literals; the full
// sweep extends to all 256 extensions over the 8 assignments.
NoConsReport check_no_cons(const HiddenVariableModel& m, bool full_sweep = false);

// --- outcome-structure checks ---

struct CheckItem {
  std::string name;
  bool holds = true;
  std::string detail;
};

struct ExNowmReport {
  std::vector<CheckItem> checks;
  bool ok() const;
};

// EX: conditional on parallel settings, each wing yields exactly one of the
// two outcomes. NOWM: no outcome event carries weight without its setting.
// The space overload allows auditing externally supplied spaces.
ExNowmReport check_ex_nowm(const FiniteProbabilitySpace& space);
ExNowmReport check_ex_nowm(const HiddenVariableModel& m);

// --- canned models ---

HiddenVariableModel uniform_model();
HiddenVariableModel point_mass_model(const CauseAssignment& c);
// C11 and C22 fair and independent, C33 the complement of C11.
HiddenVariableModel anticorrelated_model();
// Every single cause literal is uncorrelated with the settings but the
// conjunction C11 & C22 is. Stand-in for a model of that phenomenon from the
// literature whose exact construction is not reproduced here.
HiddenVariableModel szabo_standin();
// Settings a deterministic function of C11; most pairs never occur.
HiddenVariableModel hard_conspiracy_model();
// All pairs occur, rows tilted by C11.
HiddenVariableModel soft_conspiracy_model();

// --- serialization (bit-exact round trip) ---

nlohmann::json model_to_json(const HiddenVariableModel& m);
HiddenVariableModel model_from_json(const nlohmann::json& j);

}  // namespace bellwright::models
