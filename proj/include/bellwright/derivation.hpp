#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellwright/models.hpp"
#include "bellwright/space.hpp"

namespace bellwright::derivation {

// Result of collapsing a screening variable over a perfect correlation to a
// two-valued one: the values split into those compatible with the correlated
// events (I+) and the rest, and the disjunction of the I+ values acts as a
// common cause event type.
struct BinarySplit {
  Variable source;
  std::vector<std::string> plus_values;
  std::vector<std::string> minus_values;
  EventExpr cause_event;
};

// Requires a and b perfectly correlated given `given` and v screening them
// off; throws NotPerfectlyCorrelated / NotScreeningOff naming the failing
// equation or value. The returned event is verified exactly (necessary and
// sufficient for both a and b, conditional on `given`) before returning.
BinarySplit reduce_to_binary(const FiniteProbabilitySpace& space, const Variable& v,
                             const EventExpr& a, const EventExpr& b,
                             const std::optional<EventExpr>& given = std::nullopt);

// An outcome identified with the conjunction of its local setting and one
// cause literal, both implication directions holding on every
// positive-weight atom.
struct MinimalTheory {
  std::string outcome_event;  // e.g. "L1+"
  std::string setting;        // e.g. "L1"
  std::string cause_atom;     // e.g. "C11"
  bool cause_negated = false;

  EventExpr condition() const;
};

std::string describe_theory(const MinimalTheory& t);

// Verifies the four biconditionals (L1&C11)<->L1+, (L2&C22)<->L2+,
// (R2&!C22)<->R2+, (R3&!C33)<->R3+ as extension identities; throws
// BiconditionalFails naming a witnessing atom.
std::vector<MinimalTheory> derive_minimal_theories(const FiniteProbabilitySpace& space);

struct EqualityCheck {
  std::string key;
  std::string description;
  Rational lhs;
  Rational rhs;
  bool holds = false;
  Rational residual;  // lhs - rhs
};

struct EqualitiesReport {
  std::vector<EqualityCheck> checks;
  bool ok() const;
};

// p(L1+ & R2+ & L1 & R2) = p(L1 & C11 & R2 & !C22) and the (2,3), (1,3)
// analogues, exactly.
EqualitiesReport decompose_probabilities(const FiniteProbabilitySpace& space);

struct CauseProbabilityReport {
  bool no_cons_holds = false;
  std::string no_cons_violation;  // first violating conjunction, when any
  EqualitiesReport equalities;    // the three cause-marginal identities
};

// p_ij(++) rewritten as two cause-assignment masses. The rewrite leans on
// no-conspiracy; when that fails on the space the report flags the step as
// unproven but still evaluates both sides numerically.
CauseProbabilityReport cause_probabilities(const FiniteProbabilitySpace& space);

struct BellCheck {
  bool satisfied = false;
  double slack = 0;  // p12 + p23 - p13
};

struct BellCheckExact {
  bool satisfied = false;
  Rational slack;
};

// Inputs must lie in [0,1]; throws OutOfRange otherwise.
BellCheck bell_check(double p13, double p12, double p23);
BellCheckExact bell_check(const Rational& p13, const Rational& p12, const Rational& p23);

enum class StepStatus { Proven, Failed, Blocked, Premise, Vacuous };

std::string step_status_name(StepStatus s);

struct DerivationStep {
  std::string key;    // stable identifier, e.g. "eq32"
  std::string title;  // human-readable role
  StepStatus status = StepStatus::Blocked;
  std::vector<std::string> notes;
};

struct DerivationReport {
  std::vector<DerivationStep> steps;
  std::optional<Rational> p12, p23, p13, slack;

  const DerivationStep* find(const std::string& key) const;
  // Premise and vacuous steps do not count against a full proof.
  bool all_proven() const;
  nlohmann::json to_json() const;
};

// Replays the whole chain on the model's induced space, in order:
// assumption checks run unconditionally, derived steps report "blocked"
// when a premise failed instead of re-deriving from it.
DerivationReport run_derivation(const models::HiddenVariableModel& m);

}  // namespace bellwright::derivation
