// Acceptance suite: every release-gating criterion in one binary, one
// pass/fail line each, with its runtime budget enforced. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "bellwright/derivation.hpp"
#include "bellwright/errors.hpp"
#include "bellwright/feasibility.hpp"
#include "bellwright/models.hpp"
#include "bellwright/quantum.hpp"
#include "bellwright/scan.hpp"
#include "bellwright/simulate.hpp"
#include "generators.hpp"

using namespace bellwright;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, const std::string& title, bool pass, double elapsed_ms,
            double budget_ms, const std::string& detail = "") {
  bool in_budget = elapsed_ms < budget_ms;
  bool ok = pass && in_budget;
  if (!ok) ++failures;
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << title
            << " (" << static_cast<long>(elapsed_ms) << " ms, budget "
            << static_cast<long>(budget_ms) << " ms)";
  if (!pass && !detail.empty()) std::cout << " -- " << detail;
  if (pass && !in_budget) std::cout << " -- over time budget";
  std::cout << "\n";
}

struct Timer {
  Clock::time_point start = Clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }
};

// 1: per-pair normalization and flat marginals over random configurations;
// perfect anticorrelation exact at parallel settings.
void criterion_1() {
  Timer timer;
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> angle(0.0, 360.0);
  for (int round = 0; round < 1000 && pass; ++round) {
    auto cfg = quantum::DirectionConfig::from_degrees(angle(rng), angle(rng), angle(rng));
    for (int i = 1; i <= 3 && pass; ++i) {
      for (int j = 1; j <= 3 && pass; ++j) {
        double sum = 0;
        double left_plus = 0;
        for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
          for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
            double p = quantum::joint_prob(cfg, i, j, a, b);
            sum += p;
            if (a == Outcome::Plus) left_plus += p;
          }
        }
        if (std::fabs(sum - 1.0) > 1e-12 || std::fabs(left_plus - 0.5) > 1e-12 ||
            quantum::marginal_prob(cfg, Wing::Left, i, j, Outcome::Plus) != 0.5) {
          pass = false;
          detail = "normalization or marginal off at round " + std::to_string(round);
        }
      }
    }
    for (int i = 1; i <= 3 && pass; ++i) {
      double pm = quantum::joint_prob(cfg, i, i, Outcome::Plus, Outcome::Minus);
      double pp = quantum::joint_prob(cfg, i, i, Outcome::Plus, Outcome::Plus);
      if (pm / (pm + pp) != 1.0) {
        pass = false;
        detail = "parallel-pair anticorrelation not exact";
      }
    }
  }
  report(1, "quantum identities over 1000 random configurations", pass, timer.ms(),
         1000.0, detail);
}

// 2: the slack curve over (0, theta, 2 theta) bottoms out at -0.125 near 60
// degrees on a 0.1-degree grid.
void criterion_2() {
  Timer timer;
  auto result = wigner_scan(0.1, 179.9, 0.1);
  const auto& best = result.rows[result.argmin];
  bool pass = std::fabs(best.theta_deg - 60.0) <= 0.5 &&
              std::fabs(best.slack - (-0.125)) <= 1e-9;
  std::ostringstream detail;
  detail << "min slack " << best.slack << " at " << best.theta_deg;
  report(2, "scan finds slack -0.125 at theta=60", pass, timer.ms(), 5000.0,
         detail.str());
}

// 3: the two landmark configurations, exact.
void criterion_3() {
  Timer timer;
  bool pass = true;
  std::string detail;

  auto violating = quantum::quantum_targets(quantum::DirectionConfig::from_degrees(0, 60, 120));
  auto p13 = violating.at(1, 3, Outcome::Plus, Outcome::Plus).value;
  auto p12 = violating.at(1, 2, Outcome::Plus, Outcome::Plus).value;
  auto p23 = violating.at(2, 3, Outcome::Plus, Outcome::Plus).value;
  if (!violating.all_exact() || p13 != make_rational(3, 8) || p12 != make_rational(1, 8) ||
      p23 != make_rational(1, 8) || derivation::bell_check(p13, p12, p23).satisfied) {
    pass = false;
    detail = "(0,60,120) values or verdict wrong";
  }

  auto satisfied = quantum::quantum_targets(quantum::DirectionConfig::from_degrees(0, 120, 240));
  auto q13 = satisfied.at(1, 3, Outcome::Plus, Outcome::Plus).value;
  auto q12 = satisfied.at(1, 2, Outcome::Plus, Outcome::Plus).value;
  auto q23 = satisfied.at(2, 3, Outcome::Plus, Outcome::Plus).value;
  if (q13 != make_rational(3, 8) || q12 != make_rational(3, 8) ||
      q23 != make_rational(3, 8) || !derivation::bell_check(q13, q12, q23).satisfied) {
    pass = false;
    detail = "(0,120,240) values or verdict wrong";
  }
  report(3, "landmark values (3/8,1/8,1/8) violated and (3/8,3/8,3/8) satisfied", pass,
         timer.ms(), 1000.0, detail);
}

// 4: the theorem as a property test - every assumption-satisfying model
// proves the chain and lands at nonnegative slack, exactly.
void criterion_4() {
  Timer timer;
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(40404);
  for (int round = 0; round < 200 && pass; ++round) {
    auto model = testgen::random_mth_model(rng);
    auto report_ = derivation::run_derivation(model);
    if (!report_.all_proven() || !report_.slack || *report_.slack < 0) {
      pass = false;
      detail = "model at round " + std::to_string(round) + " broke the chain";
    }
  }
  report(4, "200 randomized deterministic models prove BELL with slack >= 0", pass,
         timer.ms(), 30000.0, detail);
}

// 5: feasibility verdicts with self-verified certificates on the three
// landmark configurations.
void criterion_5() {
  using feasibility::Verdict;
  Timer total;
  bool pass = true;
  std::string detail;

  {
    Timer t;
    auto problem = feasibility::encode(
        quantum::quantum_targets(quantum::DirectionConfig::from_degrees(0, 60, 120)));
    auto result = feasibility::solve(problem);
    if (result.verdict != Verdict::Infeasible ||
        result.certificate->named_form != "eq32" ||
        result.certificate->violation != make_rational(1, 8) ||
        !feasibility::verify_certificate(result, problem) || t.ms() >= 2000.0) {
      pass = false;
      detail = "(0,60,120) certificate wrong or slow";
    }
  }
  {
    Timer t;
    auto problem = feasibility::encode(
        quantum::quantum_targets(quantum::DirectionConfig::from_degrees(0, 120, 240)));
    auto result = feasibility::solve(problem);
    if (result.verdict != Verdict::Infeasible ||
        result.certificate->named_form != "agreement" ||
        !feasibility::verify_certificate(result, problem) || t.ms() >= 2000.0) {
      pass = false;
      detail = "(0,120,240) should fail via the agreement bound";
    }
  }
  {
    Timer t;
    auto targets = quantum::quantum_targets(quantum::DirectionConfig::from_degrees(0, 90, 180));
    auto problem = feasibility::encode(targets);
    auto result = feasibility::solve(problem);
    bool witness_ok = false;
    if (result.verdict == Verdict::Feasible && result.witness) {
      auto reproduced = models::predicted_conditionals(*result.witness);
      witness_ok = true;
      for (int i = 1; i <= 3 && witness_ok; ++i) {
        for (int j = 1; j <= 3 && witness_ok; ++j) {
          for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
            for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
              if (reproduced.at(i, j, a, b).value != targets.at(i, j, a, b).value) {
                witness_ok = false;
              }
            }
          }
        }
      }
    }
    if (!witness_ok || !feasibility::verify_certificate(result, problem) ||
        t.ms() >= 2000.0) {
      pass = false;
      detail = "(0,90,180) witness missing or not exact";
    }
  }
  report(5, "feasibility certificates at the three landmark configurations", pass,
         total.ms(), 6000.0, detail);
}

// 6: binary reduction over randomized screened spaces; broken inputs raise
// the named errors.
void criterion_6() {
  Timer timer;
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(606060);
  for (int round = 0; round < 500 && pass; ++round) {
    auto made = testgen::random_screened_space(rng, 6);
    try {
      auto split = derivation::reduce_to_binary(made.space, made.variable, made.a, made.b);
      if (split.plus_values != made.expected_plus) {
        pass = false;
        detail = "wrong I+ at round " + std::to_string(round);
        break;
      }
      AtomMask ma = made.space.satisfying_atoms(made.a);
      AtomMask mb = made.space.satisfying_atoms(made.b);
      for (const auto& value : made.variable.value_events) {
        const AtomMask& mq = made.space.extension(value);
        Rational pq = made.space.mass(mq);
        if (pq == 0) continue;
        Rational a_mass = 0, b_mass = 0;
        for (std::size_t k = 0; k < mq.size(); ++k) {
          if (mq[k] && ma[k]) a_mass += made.space.weight(k);
          if (mq[k] && mb[k]) b_mass += made.space.weight(k);
        }
        bool plus = std::find(split.plus_values.begin(), split.plus_values.end(),
                              value) != split.plus_values.end();
        bool ok = plus ? (a_mass == pq && b_mass == pq) : (a_mass == 0 && b_mass == 0);
        if (!ok) {
          pass = false;
          detail = "split equations violated at round " + std::to_string(round);
          break;
        }
      }
    } catch (const Error& e) {
      pass = false;
      detail = std::string("unexpected error: ") + e.what();
    }
  }

  // deliberately broken inputs raise the named errors
  if (pass) {
    SpaceBuilder imperfect;
    imperfect.add_atom("both", make_rational(1, 2));
    imperfect.add_atom("a_only", make_rational(1, 2));
    imperfect.declare_event("Vq1", {0, 1});
    imperfect.declare_event("A", {0, 1});
    imperfect.declare_event("B", {0});
    auto space = imperfect.build();
    try {
      derivation::reduce_to_binary(space, Variable{"V", {"Vq1"}}, EventExpr::atom("A"),
                                   EventExpr::atom("B"));
      pass = false;
      detail = "imperfect correlation not rejected";
    } catch (const NotPerfectlyCorrelated&) {
    }
  }
  if (pass) {
    SpaceBuilder unscreened;
    unscreened.add_atom("v1_both", make_rational(1, 4));
    unscreened.add_atom("v1_neither", make_rational(1, 4));
    unscreened.add_atom("v2_both", make_rational(1, 2));
    unscreened.declare_event("Vq1", {0, 1});
    unscreened.declare_event("Vq2", {2});
    unscreened.declare_event("A", {0, 2});
    unscreened.declare_event("B", {0, 2});
    auto space = unscreened.build();
    try {
      derivation::reduce_to_binary(space, Variable{"V", {"Vq1", "Vq2"}},
                                   EventExpr::atom("A"), EventExpr::atom("B"));
      pass = false;
      detail = "failed screening not rejected";
    } catch (const NotScreeningOff&) {
    }
  }
  report(6, "binary reduction sound on 500 randomized screened spaces", pass,
         timer.ms(), 10000.0, detail);
}

// 7: Monte Carlo convergence and bit-stable reruns at one million trials.
void criterion_7() {
  Timer timer;
  bool pass = true;
  std::string detail;
  auto model = models::uniform_model();
  simulate::RunConfig cfg{1000000, 20240601, 8, false};
  auto table = simulate::run(model, cfg);
  auto exact = models::predicted_conditionals(model);
  double worst = 0;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
          auto est = simulate::estimate(table, pair_index(i, j), outcome_index(a, b));
          double err = std::fabs(est.point - exact.at(i, j, a, b).value.get_d());
          worst = std::max(worst, err);
        }
      }
    }
  }
  if (worst >= 0.005) {
    pass = false;
    detail = "worst cell error " + std::to_string(worst);
  }
  auto bell = simulate::empirical_bell(table);
  if (bell.verdict != simulate::EmpiricalVerdict::Satisfied ||
      bell.slack - bell.half_width <= 0) {
    pass = false;
    detail = "empirical slack interval does not exclude 0 on the positive side";
  }
  auto rerun = simulate::run(model, cfg);
  if (rerun.pair_outcome != table.pair_outcome || rerun.cause_pair != table.cause_pair) {
    pass = false;
    detail = "rerun not bit-identical";
  }
  report(7, "one-million-trial run converges and reruns bit-identically", pass,
         timer.ms(), 60000.0, detail);
}

// 8: the stand-in conspiracy hides from every single-atom check and is
// caught by a conjunction, both exactly and empirically.
void criterion_8() {
  Timer timer;
  bool pass = true;
  std::string detail;
  auto model = models::szabo_standin();

  auto exact = models::check_no_cons(model);
  bool exact_conjunction_flag = false;
  for (const auto& entry : exact.checks) {
    if (entry.literal_count == 1 && entry.violated) {
      pass = false;
      detail = "exact single-atom check violated: " + entry.conjunction;
    }
    if (entry.literal_count >= 2 && entry.violated) exact_conjunction_flag = true;
  }
  if (!exact_conjunction_flag) {
    pass = false;
    detail = "no exact conjunction violation found";
  }

  simulate::RunConfig cfg{1000000, 20240601, 8, false};
  auto table = simulate::run(model, cfg);
  auto empirical = simulate::empirical_no_cons(table);
  bool empirical_conjunction_flag = false;
  for (const auto& entry : empirical.checks) {
    if (entry.literal_count == 1 && entry.flagged) {
      pass = false;
      detail = "empirical single-atom flag: " + entry.conjunction + " vs pair " +
               pair_name(pair_from_index(entry.pair_idx));
    }
    if (entry.literal_count >= 2 && entry.flagged) empirical_conjunction_flag = true;
  }
  if (!empirical_conjunction_flag) {
    pass = false;
    detail = "no empirical conjunction flag at one million trials";
  }
  report(8, "conspiracy stand-in passes atom checks, fails conjunction checks", pass,
         timer.ms(), 60000.0, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: FAILURES PRESENT")
            << "\n";
  return failures == 0 ? 0 : 1;
}
