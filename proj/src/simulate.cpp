#include "bellwright/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bellwright/errors.hpp"
#include "bellwright/philox.hpp"

namespace bellwright::simulate {

std::uint64_t FrequencyTable::pair_total(int pair_idx) const {
  std::uint64_t total = 0;
  for (int cell = 0; cell < kOutcomeCells; ++cell) {
    total += pair_outcome[static_cast<std::size_t>(pair_idx)][static_cast<std::size_t>(cell)];
  }
  return total;
}

std::uint64_t FrequencyTable::assignment_total(int assignment) const {
  std::uint64_t total = 0;
  for (int p = 0; p < kNumPairs; ++p) {
    total += cause_pair[static_cast<std::size_t>(assignment)][static_cast<std::size_t>(p)];
  }
  return total;
}

namespace {

using U128 = unsigned __int128;

// floor(q * 2^64) as a 128-bit fixed-point threshold; exact via GMP.
U128 fixed_point_threshold(const Rational& q) {
  mpz_class scaled = (q.get_num() << 64) / q.get_den();
  U128 out = 0;
  // export limb by limb (the value fits in 65 bits for q <= 1)
  mpz_class rest = scaled;
  int shift = 0;
  while (rest != 0 && shift < 128) {
    out |= static_cast<U128>(mpz_class(rest & 0xFFFFFFFF).get_ui()) << shift;
    rest >>= 32;
    shift += 32;
  }
  return out;
}

struct SamplingTables {
  // cumulative thresholds over assignments, then per assignment over pairs
  std::array<U128, models::kNumAssignments> assignment{};
  std::array<std::array<U128, kNumPairs>, models::kNumAssignments> pair{};
};

SamplingTables build_tables(const models::HiddenVariableModel& m) {
  SamplingTables tables;
  Rational cum = 0;
  for (int c = 0; c < models::kNumAssignments; ++c) {
    cum += m.cause_dist[static_cast<std::size_t>(c)];
    tables.assignment[static_cast<std::size_t>(c)] = fixed_point_threshold(cum);
  }
  for (int c = 0; c < models::kNumAssignments; ++c) {
    Rational row_cum = 0;
    for (int p = 0; p < kNumPairs; ++p) {
      row_cum += m.policy.prob(p, c);
      tables.pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] =
          fixed_point_threshold(row_cum);
    }
  }
  return tables;
}

template <std::size_t N>
int pick(const std::array<U128, N>& thresholds, std::uint64_t draw) {
  U128 value = draw;
  for (std::size_t k = 0; k < N; ++k) {
    if (value < thresholds[k]) return static_cast<int>(k);
  }
  return static_cast<int>(N - 1);  // cumulative reaches 2^64 > any draw
}

FrequencyTable run_substream(const models::HiddenVariableModel& m,
                             const SamplingTables& tables, const RunConfig& cfg,
                             std::uint32_t substream, std::uint64_t count) {
  FrequencyTable t;
  t.blind = cfg.blind;
  for (std::uint64_t trial = 0; trial < count; ++trial) {
    TrialDraws draws = trial_draws(cfg.seed, substream, trial);
    int c = pick(tables.assignment, draws.first);
    int p = pick(tables.pair[static_cast<std::size_t>(c)], draws.second);
    models::ResponseOutcome out =
        m.response.respond(models::CauseAssignment::from_index(c), pair_from_index(p));
    int cell = (out.left && out.right) ? outcome_index(*out.left, *out.right)
                                       : kIncompleteCell;
    t.pair_outcome[static_cast<std::size_t>(p)][static_cast<std::size_t>(cell)] += 1;
    if (!cfg.blind) {
      t.cause_pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] += 1;
    }
    t.trials += 1;
  }
  return t;
}

void merge_into(FrequencyTable& total, const FrequencyTable& part) {
  total.trials += part.trials;
  for (int c = 0; c < models::kNumAssignments; ++c) {
    for (int p = 0; p < kNumPairs; ++p) {
      total.cause_pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] +=
          part.cause_pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
    }
  }
  for (int p = 0; p < kNumPairs; ++p) {
    for (int cell = 0; cell < kOutcomeCells; ++cell) {
      total.pair_outcome[static_cast<std::size_t>(p)][static_cast<std::size_t>(cell)] +=
          part.pair_outcome[static_cast<std::size_t>(p)][static_cast<std::size_t>(cell)];
    }
  }
}

std::uint64_t substream_count(const RunConfig& cfg, std::uint32_t s) {
  std::uint64_t base = cfg.trials / cfg.substreams;
  std::uint64_t rem = cfg.trials % cfg.substreams;
  return base + (s < rem ? 1 : 0);
}

void validate_config(const models::HiddenVariableModel& m, const RunConfig& cfg) {
  m.validate();
  if (cfg.trials < 1) throw InvalidModel("run needs at least one trial");
  if (cfg.substreams < 1) throw InvalidModel("run needs at least one substream");
}

FrequencyTable assemble(const models::HiddenVariableModel& m, const RunConfig& cfg,
                        const std::vector<FrequencyTable>& parts) {
  FrequencyTable total;
  total.seed = cfg.seed;
  total.substreams = cfg.substreams;
  total.blind = cfg.blind;
  for (const auto& part : parts) merge_into(total, part);
  (void)m;
  return total;
}

}  // namespace

int effective_threads() {
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  if (const char* cap = std::getenv("BELLWRIGHT_THREADS")) {
    int limit = std::atoi(cap);
    if (limit >= 1 && limit < threads) threads = limit;
  }
  return threads;
}

FrequencyTable run(const models::HiddenVariableModel& m, const RunConfig& cfg) {
  validate_config(m, cfg);
  SamplingTables tables = build_tables(m);
  std::vector<FrequencyTable> parts(cfg.substreams);
  const int S = static_cast<int>(cfg.substreams);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (int s = 0; s < S; ++s) {
    parts[static_cast<std::size_t>(s)] =
        run_substream(m, tables, cfg, static_cast<std::uint32_t>(s),
                      substream_count(cfg, static_cast<std::uint32_t>(s)));
  }
  return assemble(m, cfg, parts);
}

FrequencyTable run_reference(const models::HiddenVariableModel& m, const RunConfig& cfg) {
  validate_config(m, cfg);
  SamplingTables tables = build_tables(m);
  std::vector<FrequencyTable> parts(cfg.substreams);
  for (std::uint32_t s = 0; s < cfg.substreams; ++s) {
    parts[s] = run_substream(m, tables, cfg, s, substream_count(cfg, s));
  }
  return assemble(m, cfg, parts);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw OutOfRange("normal quantile needs p in (0,1)");
  // bisection on Phi(x) = erfc(-x/sqrt 2)/2; plenty fast for how rarely
  // quantiles are needed
  double lo = -40.0, hi = 40.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    if (cdf < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// Regularized incomplete beta via the standard continued fraction.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-14) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_inv(double target, double a, double b) {
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Estimate estimate_counts(std::uint64_t count, std::uint64_t total, double confidence,
                         IntervalMethod method) {
  if (total == 0) throw EmptySubensemble("conditioning count is zero");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw OutOfRange("confidence must be in (0,1)");
  }
  Estimate e;
  e.count = count;
  e.total = total;
  double n = static_cast<double>(total);
  e.point = static_cast<double>(count) / n;
  if (method == IntervalMethod::Normal) {
    double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    double hw = z * std::sqrt(e.point * (1.0 - e.point) / n);
    e.lo = std::max(0.0, e.point - hw);
    e.hi = std::min(1.0, e.point + hw);
    e.half_width = hw;
  } else {
    double alpha = 1.0 - confidence;
    double k = static_cast<double>(count);
    e.lo = count == 0 ? 0.0 : beta_inv(alpha / 2.0, k, n - k + 1.0);
    e.hi = count == total ? 1.0 : beta_inv(1.0 - alpha / 2.0, k + 1.0, n - k);
    e.half_width = 0.5 * (e.hi - e.lo);
  }
  return e;
}

Estimate estimate(const FrequencyTable& t, int pair_idx, int outcome_cell,
                  double confidence, IntervalMethod method) {
  return estimate_counts(
      t.pair_outcome[static_cast<std::size_t>(pair_idx)][static_cast<std::size_t>(outcome_cell)],
      t.pair_total(pair_idx), confidence, method);
}

std::string verdict_name(EmpiricalVerdict v) {
  switch (v) {
    case EmpiricalVerdict::Satisfied: return "satisfied";
    case EmpiricalVerdict::Violated: return "violated";
    case EmpiricalVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

EmpiricalBell empirical_bell(const FrequencyTable& t, double confidence,
                             IntervalMethod method) {
  const int cell_pp = outcome_index(Outcome::Plus, Outcome::Plus);
  EmpiricalBell result;
  result.p12 = estimate(t, pair_index(1, 2), cell_pp, confidence, method);
  result.p23 = estimate(t, pair_index(2, 3), cell_pp, confidence, method);
  result.p13 = estimate(t, pair_index(1, 3), cell_pp, confidence, method);
  result.slack = result.p12.point + result.p23.point - result.p13.point;
  result.half_width =
      result.p12.half_width + result.p23.half_width + result.p13.half_width;
  if (result.slack - result.half_width >= 0.0) {
    result.verdict = EmpiricalVerdict::Satisfied;
  } else if (result.slack + result.half_width < 0.0) {
    result.verdict = EmpiricalVerdict::Violated;
  } else {
    result.verdict = EmpiricalVerdict::Inconclusive;
  }
  return result;
}

bool EmpiricalNoConsReport::any_flagged() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const EmpiricalNoConsEntry& e) { return e.flagged; });
}

std::vector<EmpiricalNoConsEntry> EmpiricalNoConsReport::flags() const {
  std::vector<EmpiricalNoConsEntry> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
               [](const EmpiricalNoConsEntry& e) { return e.flagged; });
  return out;
}

EmpiricalNoConsReport empirical_no_cons(const FrequencyTable& t, double confidence) {
  if (t.blind) {
    throw Error("table was recorded blind; the no-conspiracy check needs the cause log");
  }
  if (t.trials == 0) throw EmptySubensemble("empty table");

  EmpiricalNoConsReport report;
  auto conjunctions = models::cause_conjunctions(false);
  for (const auto& conj : conjunctions) {
    std::uint64_t phi_total = 0;
    std::array<std::uint64_t, kNumPairs> phi_pair{};
    for (int c = 0; c < models::kNumAssignments; ++c) {
      if (!conj.contains(c)) continue;
      for (int p = 0; p < kNumPairs; ++p) {
        std::uint64_t n =
            t.cause_pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
        phi_pair[static_cast<std::size_t>(p)] += n;
        phi_total += n;
      }
    }
    Estimate marginal = estimate_counts(phi_total, t.trials, confidence);
    for (int p = 0; p < kNumPairs; ++p) {
      std::uint64_t pair_n = t.pair_total(p);
      if (pair_n == 0) continue;
      Estimate conditional =
          estimate_counts(phi_pair[static_cast<std::size_t>(p)], pair_n, confidence);
      EmpiricalNoConsEntry entry;
      entry.conjunction = conj.label;
      entry.pair_idx = p;
      entry.literal_count = conj.literal_count;
      entry.conditional = conditional.point;
      entry.marginal = marginal.point;
      entry.delta = conditional.point - marginal.point;
      entry.threshold = conditional.half_width + marginal.half_width;
      entry.flagged = std::fabs(entry.delta) > entry.threshold;
      report.checks.push_back(std::move(entry));
    }
  }
  return report;
}

void FrequencyTable::write_csv(std::ostream& os, double confidence) const {
  os << "pair,outcome,count,estimate,ci_low,ci_high\n";
  for (int p = 0; p < kNumPairs; ++p) {
    std::uint64_t total = pair_total(p);
    for (int cell = 0; cell < kOutcomeCells; ++cell) {
      std::uint64_t n =
          pair_outcome[static_cast<std::size_t>(p)][static_cast<std::size_t>(cell)];
      if (cell == kIncompleteCell && n == 0) continue;
      os << pair_name(pair_from_index(p)) << ","
         << (cell == kIncompleteCell ? std::string("incomplete")
                                     : outcome_cell_name(cell))
         << "," << n << ",";
      if (total > 0) {
        Estimate e = estimate_counts(n, total, confidence);
        os << format_number(e.point) << "," << format_number(e.lo) << ","
           << format_number(e.hi);
      } else {
        os << ",,";
      }
      os << "\n";
    }
  }
}

nlohmann::json FrequencyTable::to_json(double confidence) const {
  nlohmann::json rows = nlohmann::json::array();
  for (int p = 0; p < kNumPairs; ++p) {
    std::uint64_t total = pair_total(p);
    for (int cell = 0; cell < kOutcomeCells; ++cell) {
      std::uint64_t n =
          pair_outcome[static_cast<std::size_t>(p)][static_cast<std::size_t>(cell)];
      if (cell == kIncompleteCell && n == 0) continue;
      nlohmann::json row;
      row["pair"] = pair_name(pair_from_index(p));
      row["outcome"] = cell == kIncompleteCell ? std::string("incomplete")
                                               : outcome_cell_name(cell);
      row["count"] = n;
      if (total > 0) {
        Estimate e = estimate_counts(n, total, confidence);
        row["estimate"] = e.point;
        row["ci_low"] = e.lo;
        row["ci_high"] = e.hi;
      }
      rows.push_back(std::move(row));
    }
  }
  nlohmann::json j;
  j["trials"] = trials;
  j["seed"] = seed;
  j["substreams"] = substreams;
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace bellwright::simulate
