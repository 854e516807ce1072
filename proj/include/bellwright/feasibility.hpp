#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellwright/models.hpp"
#include "bellwright/targets.hpp"

namespace bellwright::feasibility {

// One linear equality over the cause-assignment probabilities. The
// coefficient vector is 0/1: the listed assignments carry coefficient 1.
struct ProblemRow {
  int pair_idx = -1;      // -1 marks the normalization row (sum q = 1)
  int outcome_cell = -1;  // 0..3 as in outcome_index, -1 for normalization
  std::vector<std::uint32_t> support;
  Rational rhs;
  Rational radius;  // rounding radius inherited from the target cell

  std::string label() const;
};

// Deterministic-response (minimal theory) encoding: every conditional outcome
// probability is a sum of cause-assignment masses and, by no-conspiracy,
// setting-independent. Three cause atoms by default; custom() accepts up to
// 12 (the tableau grows as 2^k columns, so large k is costly).
class FeasibilityProblem {
 public:
  static constexpr int kMaxCauseAtoms = 12;

  static FeasibilityProblem custom(int cause_atoms, std::vector<ProblemRow> rows);

  int cause_atoms() const { return cause_atoms_; }
  int assignment_count() const { return 1 << cause_atoms_; }
  const std::vector<ProblemRow>& rows() const { return rows_; }
  const std::vector<int>& included_pairs() const { return included_pairs_; }

 private:
  friend FeasibilityProblem encode(const TargetStatistics&, const std::vector<int>&);
  FeasibilityProblem() = default;

  int cause_atoms_ = 3;
  std::vector<ProblemRow> rows_;
  std::vector<int> included_pairs_;
};

// Builds the constraint system for the selected setting pairs (all included
// pairs of the table when the selection is empty). Per pair the four outcome
// cells reduce to three independent equalities; the normalization row and
// q >= 0 complete the system. Throws MalformedTargets on missing pairs.
FeasibilityProblem encode(const TargetStatistics& targets,
                          const std::vector<int>& pair_selection = {});

enum class Verdict { Feasible, Infeasible, Indeterminate };

std::string verdict_name(Verdict v);

struct CertificateTerm {
  std::size_t row_index = 0;  // into FeasibilityProblem::rows()
  Rational coefficient;
};

// Separating functional: sum_r y_r row_r has nonpositive coefficient on
// every assignment while y.rhs > 0. With rounded targets the verdict is only
// asserted when the violation clears the certificate-weighted radius bound.
struct InfeasibilityCertificate {
  std::vector<CertificateTerm> terms;
  Rational violation;      // y . rhs
  Rational epsilon_bound;  // sum |y_r| radius_r
  std::optional<std::string> named_form;
};

struct FeasibilityResult {
  Verdict verdict = Verdict::Indeterminate;
  std::vector<Rational> solution;  // assignment masses when feasible
  std::optional<models::HiddenVariableModel> witness;
  std::optional<InfeasibilityCertificate> certificate;
};

// Exact verdict with a self-verified certificate attached: an explicit model
// (uniform independent policy, deterministic response) when feasible, a
// separating functional otherwise. Named functional forms are preferred for
// readability when one applies.
FeasibilityResult solve(const FeasibilityProblem& p);

// Re-checks a result against its problem without re-running the solver;
// throws CertificateMismatch with an explanation if anything fails.
bool verify_certificate(const FeasibilityResult& r, const FeasibilityProblem& p);

nlohmann::json problem_to_json(const FeasibilityProblem& p);
nlohmann::json result_to_json(const FeasibilityResult& r, const FeasibilityProblem& p);

}  // namespace bellwright::feasibility
