#include "bellwright/feasibility.hpp"

#include <algorithm>
#include <map>

#include "bellwright/errors.hpp"
#include "bellwright/simplex.hpp"

namespace bellwright::feasibility {

std::string ProblemRow::label() const {
  if (pair_idx < 0) return "norm";
  return "p" + pair_name(pair_from_index(pair_idx)) + "(" +
         outcome_cell_name(outcome_cell) + ")";
}

FeasibilityProblem FeasibilityProblem::custom(int cause_atoms,
                                              std::vector<ProblemRow> rows) {
  if (cause_atoms < 1 || cause_atoms > kMaxCauseAtoms) {
    throw MalformedTargets("cause atom count must be in 1.." +
                           std::to_string(kMaxCauseAtoms));
  }
  FeasibilityProblem p;
  p.cause_atoms_ = cause_atoms;
  const std::uint32_t limit = 1u << cause_atoms;
  for (auto& row : rows) {
    std::sort(row.support.begin(), row.support.end());
    for (auto c : row.support) {
      if (c >= limit) throw MalformedTargets("row support references assignment beyond 2^k");
    }
  }
  p.rows_ = std::move(rows);
  return p;
}

FeasibilityProblem encode(const TargetStatistics& targets,
                          const std::vector<int>& pair_selection) {
  std::vector<int> pairs = pair_selection.empty() ? targets.included_pairs() : pair_selection;
  if (pairs.empty()) throw MalformedTargets("no setting pairs selected");

  FeasibilityProblem p;
  p.cause_atoms_ = 3;
  p.included_pairs_ = pairs;

  ProblemRow norm;
  norm.rhs = 1;
  norm.radius = 0;
  for (std::uint32_t c = 0; c < 8; ++c) norm.support.push_back(c);
  p.rows_.push_back(std::move(norm));

  for (int pair_idx : pairs) {
    if (!targets.has_pair_index(pair_idx)) {
      throw MalformedTargets("targets missing pair " +
                             pair_name(pair_from_index(pair_idx)));
    }
    SettingPair pair = pair_from_index(pair_idx);
    // The fourth cell is the difference of the normalization row and these
    // three, so it is dropped.
    for (int cell = 0; cell < 3; ++cell) {
      Outcome a = cell < 2 ? Outcome::Plus : Outcome::Minus;
      Outcome b = (cell == 0) ? Outcome::Plus : (cell == 1 ? Outcome::Minus : Outcome::Plus);
      ProblemRow row;
      row.pair_idx = pair_idx;
      row.outcome_cell = cell;
      const TargetEntry& entry = targets.at_cell(pair_idx, cell);
      row.rhs = entry.value;
      row.radius = entry.radius;
      for (std::uint32_t c = 0; c < 8; ++c) {
        bool left_plus = (c >> (pair.left - 1)) & 1u;
        bool right_minus = (c >> (pair.right - 1)) & 1u;
        bool left_ok = left_plus == (a == Outcome::Plus);
        bool right_ok = right_minus == (b == Outcome::Minus);
        if (left_ok && right_ok) row.support.push_back(c);
      }
      p.rows_.push_back(std::move(row));
    }
  }
  return p;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

namespace {

struct TermEvaluation {
  Rational violation;
  Rational bound;
};

// Checks y A <= 0 componentwise; returns the violation y.rhs (> 0 required)
// and the radius-weighted bound, or nullopt if the terms do not separate.
std::optional<TermEvaluation> evaluate_terms(const FeasibilityProblem& p,
                                             const std::vector<CertificateTerm>& terms) {
  if (terms.empty()) return std::nullopt;
  const int n = p.assignment_count();
  for (int c = 0; c < n; ++c) {
    Rational column = 0;
    for (const auto& term : terms) {
      const auto& support = p.rows()[term.row_index].support;
      if (std::binary_search(support.begin(), support.end(),
                             static_cast<std::uint32_t>(c))) {
        column += term.coefficient;
      }
    }
    if (column > 0) return std::nullopt;
  }
  TermEvaluation eval;
  eval.violation = 0;
  eval.bound = 0;
  for (const auto& term : terms) {
    const ProblemRow& row = p.rows()[term.row_index];
    eval.violation += term.coefficient * row.rhs;
    eval.bound += abs(term.coefficient) * row.radius;
  }
  if (eval.violation <= 0) return std::nullopt;
  return eval;
}

struct NamedCandidate {
  std::string name;
  std::vector<CertificateTerm> terms;
};

std::vector<NamedCandidate> named_candidates(const FeasibilityProblem& p) {
  std::vector<NamedCandidate> out;
  if (p.cause_atoms() != 3) return out;

  std::map<std::pair<int, int>, std::size_t> row_of;  // (pair_idx, cell) -> row
  std::optional<std::size_t> norm_row;
  for (std::size_t r = 0; r < p.rows().size(); ++r) {
    const auto& row = p.rows()[r];
    if (row.pair_idx < 0) {
      norm_row = r;
    } else {
      row_of[{row.pair_idx, row.outcome_cell}] = r;
    }
  }
  auto find = [&row_of](int pair_idx, int cell) -> std::optional<std::size_t> {
    auto it = row_of.find({pair_idx, cell});
    if (it == row_of.end()) return std::nullopt;
    return it->second;
  };

  // Triangle inequalities over ++ cells; the (1,2,3) ordering is the
  // inequality usually quoted, so it goes first and keeps its usual key.
  const std::array<std::array<int, 3>, 6> orders = {{
      {1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}}};
  for (const auto& ord : orders) {
    int i = ord[0], j = ord[1], k = ord[2];
    auto rik = find(pair_index(i, k), 0);
    auto rij = find(pair_index(i, j), 0);
    auto rjk = find(pair_index(j, k), 0);
    if (!rik || !rij || !rjk) continue;
    NamedCandidate cand;
    cand.name = (i == 1 && j == 2 && k == 3)
                    ? "eq32"
                    : "wigner(" + std::to_string(i) + "," + std::to_string(j) + "," +
                          std::to_string(k) + ")";
    cand.terms = {{*rik, Rational(1)}, {*rij, Rational(-1)}, {*rjk, Rational(-1)}};
    out.push_back(std::move(cand));
  }

  // Among three two-valued causes some pair must agree, so the agreement
  // masses of the three cross pairs sum to at least 1.
  if (norm_row) {
    auto r12p = find(pair_index(1, 2), 1), r12m = find(pair_index(1, 2), 2);
    auto r23p = find(pair_index(2, 3), 1), r23m = find(pair_index(2, 3), 2);
    auto r13p = find(pair_index(1, 3), 1), r13m = find(pair_index(1, 3), 2);
    if (r12p && r12m && r23p && r23m && r13p && r13m) {
      NamedCandidate cand;
      cand.name = "agreement";
      cand.terms = {{*norm_row, Rational(1)}, {*r12p, Rational(-1)},
                    {*r12m, Rational(-1)},   {*r23p, Rational(-1)},
                    {*r23m, Rational(-1)},   {*r13p, Rational(-1)},
                    {*r13m, Rational(-1)}};
      out.push_back(std::move(cand));
    }
  }

  // Perfect anticorrelation of a parallel pair: the ++ cell has empty
  // support, so any positive target on it is already a contradiction, and a
  // deficit in the +- / -+ cells shows up against the normalization row.
  for (int i = 1; i <= 3; ++i) {
    int pi = pair_index(i, i);
    if (auto rpp = find(pi, 0)) {
      NamedCandidate cand;
      cand.name = "pcorr(" + std::to_string(i) + ")";
      cand.terms = {{*rpp, Rational(1)}};
      out.push_back(std::move(cand));
    }
    if (norm_row) {
      auto rpp = find(pi, 0), rpm = find(pi, 1), rmp = find(pi, 2);
      if (rpp && rpm && rmp) {
        NamedCandidate cand;
        cand.name = "pcorr(" + std::to_string(i) + ")";
        cand.terms = {{*norm_row, Rational(1)},
                      {*rpp, Rational(-1)},
                      {*rpm, Rational(-1)},
                      {*rmp, Rational(-1)}};
        out.push_back(std::move(cand));
      }
    }
  }
  return out;
}

models::HiddenVariableModel witness_from_solution(const std::vector<Rational>& q) {
  models::HiddenVariableModel m;
  for (std::size_t c = 0; c < models::kNumAssignments; ++c) m.cause_dist[c] = q[c];
  m.policy = models::SettingPolicy::uniform();
  m.response = models::ResponseRule::mth();
  return m;
}

}  // namespace

FeasibilityResult solve(const FeasibilityProblem& p) {
  const std::size_t m = p.rows().size();
  const std::size_t n = static_cast<std::size_t>(p.assignment_count());
  std::vector<std::vector<Rational>> A(m, std::vector<Rational>(n, Rational(0)));
  std::vector<Rational> b(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (auto c : p.rows()[r].support) A[r][c] = 1;
    b[r] = p.rows()[r].rhs;
  }

  LpResult lp = solve_equality_feasibility(A, b);

  FeasibilityResult result;
  if (lp.feasible) {
    result.verdict = Verdict::Feasible;
    result.solution = lp.solution;
    if (p.cause_atoms() == 3) result.witness = witness_from_solution(lp.solution);
    verify_certificate(result, p);
    return result;
  }

  // Candidate certificates: named forms first, the simplex dual as fallback.
  std::vector<std::pair<std::optional<std::string>, std::vector<CertificateTerm>>>
      candidates;
  for (auto& named : named_candidates(p)) {
    candidates.emplace_back(named.name, std::move(named.terms));
  }
  std::vector<CertificateTerm> farkas_terms;
  for (std::size_t r = 0; r < m; ++r) {
    if (lp.farkas[r] != 0) farkas_terms.push_back({r, lp.farkas[r]});
  }
  candidates.emplace_back(std::nullopt, std::move(farkas_terms));

  // Prefer a certificate whose violation clears its rounding bound; inside
  // that preference keep candidate order.
  std::optional<InfeasibilityCertificate> chosen;
  for (const auto& [name, terms] : candidates) {
    auto eval = evaluate_terms(p, terms);
    if (!eval) continue;
    bool clears = eval->violation > eval->bound;
    if (!chosen || clears) {
      InfeasibilityCertificate cert;
      cert.terms = terms;
      cert.violation = eval->violation;
      cert.epsilon_bound = eval->bound;
      cert.named_form = name;
      chosen = std::move(cert);
    }
    if (clears) break;
  }
  if (!chosen) {
    throw Error("infeasible system produced no verifiable certificate");
  }
  result.verdict = chosen->violation > chosen->epsilon_bound ? Verdict::Infeasible
                                                             : Verdict::Indeterminate;
  result.certificate = std::move(chosen);
  verify_certificate(result, p);
  return result;
}

bool verify_certificate(const FeasibilityResult& r, const FeasibilityProblem& p) {
  if (r.verdict == Verdict::Feasible) {
    if (r.solution.size() != static_cast<std::size_t>(p.assignment_count())) {
      throw CertificateMismatch("witness solution has wrong dimension");
    }
    for (const auto& q : r.solution) {
      if (q < 0) throw CertificateMismatch("witness assigns negative mass");
    }
    for (const auto& row : p.rows()) {
      Rational sum = 0;
      for (auto c : row.support) sum += r.solution[c];
      if (sum != row.rhs) {
        throw CertificateMismatch("witness misses row " + row.label() + ": " +
                                  format_rational(sum) + " != " +
                                  format_rational(row.rhs));
      }
    }
    if (r.witness) {
      TargetStatistics predicted;
      try {
        r.witness->validate();
        predicted = models::predicted_conditionals(*r.witness);
      } catch (const Error& e) {
        throw CertificateMismatch(std::string("witness model invalid: ") + e.what());
      }
      for (const auto& row : p.rows()) {
        if (row.pair_idx < 0) continue;
        Rational value = predicted.at_cell(row.pair_idx, row.outcome_cell).value;
        if (value != row.rhs) {
          throw CertificateMismatch("witness model predicts " + format_rational(value) +
                                    " for " + row.label() + ", target " +
                                    format_rational(row.rhs));
        }
      }
    }
    return true;
  }

  if (!r.certificate) throw CertificateMismatch("missing certificate");
  for (const auto& term : r.certificate->terms) {
    if (term.row_index >= p.rows().size()) {
      throw CertificateMismatch("certificate references unknown row");
    }
  }
  auto eval = evaluate_terms(p, r.certificate->terms);
  if (!eval) {
    throw CertificateMismatch("certificate terms do not separate the cone");
  }
  if (eval->violation != r.certificate->violation) {
    throw CertificateMismatch("stored violation " +
                              format_rational(r.certificate->violation) +
                              " does not match recomputed " +
                              format_rational(eval->violation));
  }
  if (eval->bound != r.certificate->epsilon_bound) {
    throw CertificateMismatch("stored rounding bound does not match recomputed one");
  }
  bool clears = eval->violation > eval->bound;
  if (r.verdict == Verdict::Infeasible && !clears) {
    throw CertificateMismatch("violation does not clear the rounding bound");
  }
  if (r.verdict == Verdict::Indeterminate && clears) {
    throw CertificateMismatch("violation clears the bound; verdict should be infeasible");
  }
  return true;
}

nlohmann::json problem_to_json(const FeasibilityProblem& p) {
  nlohmann::json j;
  j["version"] = 1;
  j["cause_atoms"] = p.cause_atoms();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : p.rows()) {
    nlohmann::json r;
    r["label"] = row.label();
    if (row.pair_idx >= 0) {
      r["pair"] = pair_name(pair_from_index(row.pair_idx));
      r["outcome"] = outcome_cell_name(row.outcome_cell);
    }
    r["support"] = row.support;
    r["rhs"] = format_rational(row.rhs);
    r["radius"] = format_rational(row.radius);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::json result_to_json(const FeasibilityResult& r, const FeasibilityProblem& p) {
  nlohmann::json j;
  j["version"] = 1;
  j["verdict"] = verdict_name(r.verdict);
  if (r.verdict == Verdict::Feasible) {
    nlohmann::json q = nlohmann::json::array();
    for (const auto& v : r.solution) q.push_back(format_rational(v));
    j["solution"] = std::move(q);
    if (r.witness) j["witness"] = models::model_to_json(*r.witness);
  } else if (r.certificate) {
    nlohmann::json cert;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : r.certificate->terms) {
      nlohmann::json t;
      t["row"] = term.row_index;
      t["label"] = p.rows()[term.row_index].label();
      t["coefficient"] = format_rational(term.coefficient);
      terms.push_back(std::move(t));
    }
    cert["terms"] = std::move(terms);
    cert["violation"] = format_rational(r.certificate->violation);
    cert["epsilon_bound"] = format_rational(r.certificate->epsilon_bound);
    if (r.certificate->named_form) cert["named_form"] = *r.certificate->named_form;
    j["certificate"] = std::move(cert);
  }
  j["problem"] = problem_to_json(p);
  return j;
}

}  // namespace bellwright::feasibility
