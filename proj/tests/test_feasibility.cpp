#include "doctest.h"

#include <random>

#include "bellwright/derivation.hpp"
#include "bellwright/errors.hpp"
#include "bellwright/feasibility.hpp"
#include "bellwright/quantum.hpp"
#include "bellwright/simplex.hpp"
#include "generators.hpp"

using namespace bellwright;
using namespace bellwright::feasibility;
using bellwright::quantum::DirectionConfig;
using bellwright::quantum::quantum_targets;

namespace {

std::vector<int> cross_pairs() {
  return {pair_index(1, 2), pair_index(2, 3), pair_index(1, 3)};
}

Rational mass_on(const std::vector<Rational>& q, int bit, bool value) {
  Rational total = 0;
  for (std::size_t c = 0; c < q.size(); ++c) {
    if ((((c >> bit) & 1u) != 0) == value) total += q[c];
  }
  return total;
}

}  // namespace

TEST_CASE("simplex: solvable system returns a nonnegative solution") {
  // x0 + x1 = 1, x1 = 1/3
  std::vector<std::vector<Rational>> A = {{1, 1}, {0, 1}};
  std::vector<Rational> b = {1, make_rational(1, 3)};
  auto result = solve_equality_feasibility(A, b);
  REQUIRE(result.feasible);
  CHECK(result.solution[0] == make_rational(2, 3));
  CHECK(result.solution[1] == make_rational(1, 3));
}

TEST_CASE("simplex: contradictory rows produce a checkable Farkas vector") {
  std::vector<std::vector<Rational>> A = {{1, 1}, {1, 1}};
  std::vector<Rational> b = {1, 2};
  auto result = solve_equality_feasibility(A, b);
  REQUIRE_FALSE(result.feasible);
  // y A <= 0 componentwise, y b > 0
  for (std::size_t col = 0; col < 2; ++col) {
    Rational dot = 0;
    for (std::size_t row = 0; row < 2; ++row) dot += result.farkas[row] * A[row][col];
    CHECK(dot <= 0);
  }
  Rational rhs = result.farkas[0] * b[0] + result.farkas[1] * b[1];
  CHECK(rhs > 0);
}

TEST_CASE("simplex: negative rhs rows are handled through sign-flips") {
  std::vector<std::vector<Rational>> A = {{-1, 0}, {0, 1}};
  std::vector<Rational> b = {make_rational(-1, 2), make_rational(1, 2)};
  auto result = solve_equality_feasibility(A, b);
  REQUIRE(result.feasible);
  CHECK(result.solution[0] == make_rational(1, 2));
}

TEST_CASE("property: simplex decides randomized systems with certificates") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<long> pos(0, 4);
  for (int round = 0; round < 200; ++round) {
    int m = dim(rng), n = dim(rng);
    std::vector<std::vector<Rational>> A(static_cast<std::size_t>(m),
                                         std::vector<Rational>(static_cast<std::size_t>(n)));
    std::vector<Rational> x0(static_cast<std::size_t>(n));
    for (auto& row : A) {
      for (auto& v : row) v = coef(rng);
    }
    for (auto& v : x0) v = pos(rng);
    // b = A x0 guarantees feasibility
    std::vector<Rational> b(static_cast<std::size_t>(m), Rational(0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        b[static_cast<std::size_t>(i)] +=
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
            x0[static_cast<std::size_t>(j)];
      }
    }
    auto feasible = solve_equality_feasibility(A, b);
    REQUIRE(feasible.feasible);
    for (int i = 0; i < m; ++i) {
      Rational sum = 0;
      for (int j = 0; j < n; ++j) {
        sum += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               feasible.solution[static_cast<std::size_t>(j)];
      }
      CHECK(sum == b[static_cast<std::size_t>(i)]);
    }

    // arbitrary rhs: whatever the verdict, its certificate must check out
    for (auto& v : b) v = coef(rng);
    auto any = solve_equality_feasibility(A, b);
    if (any.feasible) {
      for (int i = 0; i < m; ++i) {
        Rational sum = 0;
        for (int j = 0; j < n; ++j) {
          sum += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 any.solution[static_cast<std::size_t>(j)];
        }
        CHECK(sum == b[static_cast<std::size_t>(i)]);
      }
      for (const auto& v : any.solution) CHECK(v >= 0);
    } else {
      for (int j = 0; j < n; ++j) {
        Rational dot = 0;
        for (int i = 0; i < m; ++i) {
          dot += any.farkas[static_cast<std::size_t>(i)] *
                 A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        CHECK(dot <= 0);
      }
      Rational rhs = 0;
      for (int i = 0; i < m; ++i) {
        rhs += any.farkas[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      }
      CHECK(rhs > 0);
    }
  }
}

TEST_CASE("encode: parallel pairs only pin the single-cause masses") {
  auto targets = quantum_targets(DirectionConfig::from_degrees(0, 60, 120));
  auto problem = encode(targets, {pair_index(1, 1), pair_index(2, 2), pair_index(3, 3)});
  CHECK(problem.rows().size() == 10);  // normalization + 3 rows per pair
  auto result = solve(problem);
  REQUIRE(result.verdict == Verdict::Feasible);
  for (int bit = 0; bit < 3; ++bit) {
    CHECK(mass_on(result.solution, bit, true) == make_rational(1, 2));
  }
}

TEST_CASE("encode: full quantum system at (0,60,120) carries q(C1 & !C3) = 3/8") {
  auto targets = quantum_targets(DirectionConfig::from_degrees(0, 60, 120));
  auto problem = encode(targets);
  bool found = false;
  for (const auto& row : problem.rows()) {
    if (row.pair_idx == pair_index(1, 3) && row.outcome_cell == 0) {
      found = true;
      CHECK(row.rhs == make_rational(3, 8));
      // support: assignments with c1 true and c3 false
      for (auto c : row.support) {
        CHECK((c & 1u) != 0);
        CHECK((c & 4u) == 0);
      }
      CHECK(row.support.size() == 2);
    }
  }
  CHECK(found);
}

TEST_CASE("encode: rejects requests for pairs the targets lack") {
  TargetStatistics targets;
  targets.set_pair(1, 2, {TargetEntry{make_rational(1, 4), 0},
                          TargetEntry{make_rational(1, 4), 0},
                          TargetEntry{make_rational(1, 4), 0},
                          TargetEntry{make_rational(1, 4), 0}});
  CHECK_THROWS_AS(encode(targets, {pair_index(3, 3)}), MalformedTargets);
}

TEST_CASE("solve: statistics of an explicit model are feasible and reproduced") {
  auto targets = models::predicted_conditionals(models::uniform_model());
  auto result = solve(encode(targets));
  REQUIRE(result.verdict == Verdict::Feasible);
  REQUIRE(result.witness.has_value());
  CHECK(verify_certificate(result, encode(targets)));
  auto reproduced = models::predicted_conditionals(*result.witness);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
          CHECK(reproduced.at(i, j, a, b).value == targets.at(i, j, a, b).value);
        }
      }
    }
  }
}

TEST_CASE("solve: quantum (0,60,120) is infeasible with the usual certificate") {
  auto problem = encode(quantum_targets(DirectionConfig::from_degrees(0, 60, 120)));
  auto result = solve(problem);
  REQUIRE(result.verdict == Verdict::Infeasible);
  REQUIRE(result.certificate.has_value());
  CHECK(result.certificate->named_form == "eq32");
  CHECK(result.certificate->violation == make_rational(1, 8));
  CHECK(verify_certificate(result, problem));
}

TEST_CASE("solve: quantum (0,120,240) is infeasible via the agreement bound") {
  auto problem = encode(quantum_targets(DirectionConfig::from_degrees(0, 120, 240)));
  auto result = solve(problem);
  REQUIRE(result.verdict == Verdict::Infeasible);
  REQUIRE(result.certificate.has_value());
  // the triangle inequality holds here (3/8 <= 3/4), so the certificate is
  // the three-way agreement deficit instead
  CHECK(result.certificate->named_form == "agreement");
  CHECK(result.certificate->violation == make_rational(1, 4));
  CHECK(verify_certificate(result, problem));
}

TEST_CASE("solve: quantum (0,90,180) admits the anticorrelated witness") {
  auto targets = quantum_targets(DirectionConfig::from_degrees(0, 90, 180));
  auto problem = encode(targets);
  auto result = solve(problem);
  REQUIRE(result.verdict == Verdict::Feasible);
  REQUIRE(result.witness.has_value());
  auto reproduced = models::predicted_conditionals(*result.witness);
  CHECK(reproduced.at(1, 3, Outcome::Plus, Outcome::Plus).value == make_rational(1, 2));
  CHECK(reproduced.at(1, 2, Outcome::Plus, Outcome::Plus).value == make_rational(1, 4));
  CHECK(verify_certificate(result, problem));
}

TEST_CASE("solve: rounded near-boundary targets come back indeterminate") {
  auto targets = quantum_targets(DirectionConfig::from_degrees(0, 85, 170), 10);
  auto problem = encode(targets, cross_pairs());
  auto result = solve(problem);
  CHECK(result.verdict == Verdict::Indeterminate);
  REQUIRE(result.certificate.has_value());
  CHECK(result.certificate->violation <= result.certificate->epsilon_bound);
  CHECK(verify_certificate(result, problem));
}

TEST_CASE("verify_certificate rejects tampered results") {
  auto targets = models::predicted_conditionals(models::uniform_model());
  auto problem = encode(targets);
  auto feasible = solve(problem);
  REQUIRE(feasible.verdict == Verdict::Feasible);

  auto tampered = feasible;
  // move mass between two assignments: the distribution still sums to 1
  tampered.solution[0] += make_rational(1, 16);
  tampered.solution[7] -= make_rational(1, 16);
  tampered.witness = std::nullopt;
  CHECK_THROWS_AS(verify_certificate(tampered, problem), CertificateMismatch);

  auto bad_witness = feasible;
  bad_witness.witness->cause_dist[0] += make_rational(1, 16);
  bad_witness.witness->cause_dist[7] -= make_rational(1, 16);
  CHECK_THROWS_AS(verify_certificate(bad_witness, problem), CertificateMismatch);

  auto infeasible_problem =
      encode(quantum_targets(DirectionConfig::from_degrees(0, 60, 120)));
  auto infeasible = solve(infeasible_problem);
  REQUIRE(infeasible.verdict == Verdict::Infeasible);
  auto flipped = infeasible;
  flipped.certificate->terms[0].coefficient = -flipped.certificate->terms[0].coefficient;
  CHECK_THROWS_AS(verify_certificate(flipped, infeasible_problem), CertificateMismatch);
  auto wrong_violation = infeasible;
  wrong_violation.certificate->violation += 1;
  CHECK_THROWS_AS(verify_certificate(wrong_violation, infeasible_problem),
                  CertificateMismatch);
}

TEST_CASE("property: a violated triangle inequality forces infeasibility") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<long> raw(0, 12);
  int violated_seen = 0;
  for (int round = 0; round < 300; ++round) {
    TargetStatistics targets;
    std::array<Rational, 3> pp{};
    const std::array<std::pair<int, int>, 3> pairs = {
        std::make_pair(1, 2), std::make_pair(2, 3), std::make_pair(1, 3)};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      std::array<long, 4> w{};
      long total = 0;
      for (auto& v : w) {
        v = raw(rng);
        total += v;
      }
      if (total == 0) {
        w[0] = 1;
        total = 1;
      }
      std::array<TargetEntry, 4> cells;
      for (int cell = 0; cell < 4; ++cell) {
        cells[static_cast<std::size_t>(cell)] =
            TargetEntry{make_rational(w[static_cast<std::size_t>(cell)], total), 0};
      }
      targets.set_pair(pairs[k].first, pairs[k].second, cells);
      pp[k] = cells[0].value;
    }
    auto verdict = derivation::bell_check(pp[2], pp[0], pp[1]);
    auto result = solve(encode(targets, cross_pairs()));
    if (!verdict.satisfied) {
      ++violated_seen;
      CHECK(result.verdict == Verdict::Infeasible);
    }
  }
  // the generator must actually exercise the violated branch
  CHECK(violated_seen > 20);
}

TEST_CASE("custom problems accept up to 12 cause atoms") {
  CHECK_THROWS_AS(FeasibilityProblem::custom(13, {}), MalformedTargets);

  // 4 atoms: require atom 0 true with mass 1/3 and total mass 1
  ProblemRow norm;
  for (std::uint32_t c = 0; c < 16; ++c) norm.support.push_back(c);
  norm.rhs = 1;
  norm.radius = 0;
  ProblemRow bit0;
  for (std::uint32_t c = 0; c < 16; ++c) {
    if (c & 1u) bit0.support.push_back(c);
  }
  bit0.rhs = make_rational(1, 3);
  bit0.radius = 0;
  auto problem = FeasibilityProblem::custom(4, {norm, bit0});
  auto result = solve(problem);
  REQUIRE(result.verdict == Verdict::Feasible);
  Rational mass = 0;
  for (std::size_t c = 0; c < 16; ++c) {
    if (c & 1u) mass += result.solution[c];
  }
  CHECK(mass == make_rational(1, 3));
}

TEST_CASE("result JSON carries the certificate for external audit") {
  auto problem = encode(quantum_targets(DirectionConfig::from_degrees(0, 60, 120)));
  auto result = solve(problem);
  auto j = result_to_json(result, problem);
  CHECK(j["verdict"] == "infeasible");
  CHECK(j["certificate"]["named_form"] == "eq32");
  CHECK(j["certificate"]["violation"] == "1/8");
  CHECK(j["problem"]["rows"].size() == problem.rows().size());
}
