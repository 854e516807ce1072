#include "bellwright/models.hpp"

#include <algorithm>

#include "bellwright/errors.hpp"

namespace bellwright::models {

std::string CauseAssignment::to_string() const {
  std::string s;
  s += c11 ? 'T' : 'F';
  s += c22 ? 'T' : 'F';
  s += c33 ? 'T' : 'F';
  return s;
}

CauseAssignment CauseAssignment::parse(const std::string& s) {
  if (s.size() != 3 || s.find_first_not_of("TF") != std::string::npos) {
    throw ParseError("cause assignment must be three characters of T/F, got: " + s);
  }
  return CauseAssignment{s[0] == 'T', s[1] == 'T', s[2] == 'T'};
}

SettingPolicy SettingPolicy::uniform() {
  std::array<Rational, kNumPairs> row;
  row.fill(make_rational(1, 9));
  return independent(row);
}

SettingPolicy SettingPolicy::independent(const std::array<Rational, kNumPairs>& row) {
  SettingPolicy p;
  for (auto& r : p.rows_) r = row;
  p.validate();
  return p;
}

SettingPolicy SettingPolicy::conditional(
    const std::array<std::array<Rational, kNumPairs>, kNumAssignments>& rows) {
  SettingPolicy p;
  p.rows_ = rows;
  p.validate();
  return p;
}

bool SettingPolicy::is_independent() const {
  for (int c = 1; c < kNumAssignments; ++c) {
    if (rows_[static_cast<std::size_t>(c)] != rows_[0]) return false;
  }
  return true;
}

void SettingPolicy::validate() const {
  for (int c = 0; c < kNumAssignments; ++c) {
    Rational sum = 0;
    for (const auto& p : rows_[static_cast<std::size_t>(c)]) {
      if (p < 0) throw InvalidModel("negative setting probability");
      sum += p;
    }
    if (sum != 1) {
      throw InvalidModel("setting probabilities for assignment " +
                         CauseAssignment::from_index(c).to_string() + " sum to " +
                         format_rational(sum));
    }
  }
}

ResponseRule ResponseRule::mth() {
  ResponseRule r;
  r.mth_ = true;
  r.table_ = mth_as_table();
  return r;
}

ResponseRule ResponseRule::table(ResponseTable t) {
  ResponseRule r;
  r.mth_ = false;
  r.table_ = t;
  return r;
}

ResponseTable ResponseRule::mth_as_table() {
  ResponseTable t{};
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment assignment = CauseAssignment::from_index(c);
    for (int p = 0; p < kNumPairs; ++p) {
      SettingPair pair = pair_from_index(p);
      ResponseOutcome out;
      out.left = assignment.cause(pair.left) ? Outcome::Plus : Outcome::Minus;
      out.right = assignment.cause(pair.right) ? Outcome::Minus : Outcome::Plus;
      t[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] = out;
    }
  }
  return t;
}

ResponseOutcome ResponseRule::respond(const CauseAssignment& c, SettingPair s) const {
  return table_[static_cast<std::size_t>(c.index())][static_cast<std::size_t>(pair_index(s))];
}

void HiddenVariableModel::validate() const {
  Rational sum = 0;
  for (const auto& q : cause_dist) {
    if (q < 0) throw InvalidModel("negative cause probability");
    sum += q;
  }
  if (sum != 1) throw InvalidModel("cause distribution sums to " + format_rational(sum));
  policy.validate();
}

FiniteProbabilitySpace model_to_space(const HiddenVariableModel& m) {
  m.validate();
  SpaceBuilder builder;
  std::array<std::array<std::size_t, kNumPairs>, kNumAssignments> atom_of{};
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment assignment = CauseAssignment::from_index(c);
    for (int p = 0; p < kNumPairs; ++p) {
      Rational w = m.cause_dist[static_cast<std::size_t>(c)] * m.policy.prob(p, c);
      atom_of[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] = builder.add_atom(
          assignment.to_string() + "|" + pair_name(pair_from_index(p)), std::move(w));
    }
  }

  // Declare every standard event name, including empty extensions, so
  // downstream expressions never hit UndeclaredAtom on a structurally valid
  // model space.
  for (int i = 1; i <= 3; ++i) {
    builder.declare_event(setting_name(Wing::Left, i), {});
    builder.declare_event(setting_name(Wing::Right, i), {});
    builder.declare_event(cause_name(i), {});
    builder.declare_event(cause_complement_name(i), {});
    for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
      builder.declare_event(outcome_name(Wing::Left, i, a), {});
      builder.declare_event(outcome_name(Wing::Right, i, a), {});
    }
  }

  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment assignment = CauseAssignment::from_index(c);
    for (int p = 0; p < kNumPairs; ++p) {
      SettingPair pair = pair_from_index(p);
      std::size_t atom = atom_of[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
      builder.add_to_event(setting_name(Wing::Left, pair.left), atom);
      builder.add_to_event(setting_name(Wing::Right, pair.right), atom);
      for (int i = 1; i <= 3; ++i) {
        builder.add_to_event(assignment.cause(i) ? cause_name(i) : cause_complement_name(i),
                             atom);
      }
      ResponseOutcome out = m.response.respond(assignment, pair);
      if (out.left) {
        builder.add_to_event(outcome_name(Wing::Left, pair.left, *out.left), atom);
      }
      if (out.right) {
        builder.add_to_event(outcome_name(Wing::Right, pair.right, *out.right), atom);
      }
    }
  }
  return builder.build();
}

TargetStatistics predicted_conditionals(const HiddenVariableModel& m) {
  FiniteProbabilitySpace space = model_to_space(m);
  TargetStatistics stats;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      EventExpr setting = EventExpr::atom(setting_name(Wing::Left, i)) &&
                          EventExpr::atom(setting_name(Wing::Right, j));
      std::array<TargetEntry, 4> cells;
      for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
        for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
          EventExpr joint = EventExpr::atom(outcome_name(Wing::Left, i, a)) &&
                            EventExpr::atom(outcome_name(Wing::Right, j, b));
          cells[static_cast<std::size_t>(outcome_index(a, b))] =
              TargetEntry{cond_prob(space, joint, setting), 0};
        }
      }
      stats.set_pair(i, j, cells);
    }
  }
  return stats;
}

EventExpr CauseConjunction::expr() const {
  // Disjunction of the satisfying assignments' minterms; works for literal
  // conjunctions and arbitrary extensions alike.
  std::optional<EventExpr> acc;
  for (int c = 0; c < kNumAssignments; ++c) {
    if (!contains(c)) continue;
    CauseAssignment a = CauseAssignment::from_index(c);
    std::optional<EventExpr> term;
    for (int i = 1; i <= 3; ++i) {
      EventExpr literal = EventExpr::atom(cause_name(i));
      if (!a.cause(i)) literal = !literal;
      term = term ? (*term && literal) : literal;
    }
    acc = acc ? (*acc || *term) : *term;
  }
  if (!acc) {
    EventExpr c11 = EventExpr::atom(cause_name(1));
    return c11 && !c11;  // empty extension
  }
  return *acc;
}

std::vector<CauseConjunction> cause_conjunctions(bool full_sweep) {
  std::vector<CauseConjunction> out;
  for (unsigned atoms = 1; atoms < 8; ++atoms) {  // nonempty subsets of {C11,C22,C33}
    int n = __builtin_popcount(atoms);
    for (unsigned signs = 0; signs < (1u << n); ++signs) {
      CauseConjunction conj;
      conj.literal_count = n;
      unsigned mask = 0xFF;
      int bit = 0;
      for (int i = 0; i < 3; ++i) {
        if (!(atoms & (1u << i))) continue;
        bool positive = (signs & (1u << bit)) == 0;
        ++bit;
        unsigned atom_mask = 0;
        for (unsigned c = 0; c < 8; ++c) {
          bool value = (c & (1u << i)) != 0;
          if (value == positive) atom_mask |= (1u << c);
        }
        mask &= atom_mask;
        if (!conj.label.empty()) conj.label += "&";
        conj.label += (positive ? "" : "!") + cause_name(i + 1);
      }
      conj.mask = mask;
      out.push_back(std::move(conj));
    }
  }
  if (full_sweep) {
    for (unsigned mask = 0; mask < 256; ++mask) {
      CauseConjunction conj;
      conj.mask = mask;
      conj.literal_count = 0;
      conj.label = "ext:" + std::to_string(mask);
      out.push_back(std::move(conj));
    }
  }
  return out;
}

bool NoConsReport::ok() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const NoConsEntry& e) { return e.violated; });
}

std::vector<NoConsEntry> NoConsReport::violations() const {
  std::vector<NoConsEntry> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
               [](const NoConsEntry& e) { return e.violated; });
  return out;
}

NoConsReport check_no_cons(const HiddenVariableModel& m, bool full_sweep) {
  m.validate();
  // p(pair), p(assignment) and the joint come straight off the model's
  // parameters; no space construction needed.
  std::array<Rational, kNumPairs> pair_prob;
  pair_prob.fill(0);
  for (int p = 0; p < kNumPairs; ++p) {
    for (int c = 0; c < kNumAssignments; ++c) {
      pair_prob[static_cast<std::size_t>(p)] +=
          m.cause_dist[static_cast<std::size_t>(c)] * m.policy.prob(p, c);
    }
  }

  std::vector<CauseConjunction> conjunctions = cause_conjunctions(full_sweep);

  NoConsReport report;
  for (const auto& conj : conjunctions) {
    Rational marginal = 0;
    for (unsigned c = 0; c < 8; ++c) {
      if (conj.mask & (1u << c)) marginal += m.cause_dist[c];
    }
    for (int p = 0; p < kNumPairs; ++p) {
      if (pair_prob[static_cast<std::size_t>(p)] == 0) continue;
      Rational joint = 0;
      for (unsigned c = 0; c < 8; ++c) {
        if (conj.mask & (1u << c)) {
          joint += m.cause_dist[c] * m.policy.prob(p, static_cast<int>(c));
        }
      }
      NoConsEntry entry;
      entry.conjunction = conj.label;
      entry.pair_idx = p;
      entry.literal_count = conj.literal_count;
      entry.conditional = joint / pair_prob[static_cast<std::size_t>(p)];
      entry.marginal = marginal;
      entry.delta = entry.conditional - entry.marginal;
      entry.violated = entry.delta != 0;
      report.checks.push_back(std::move(entry));
    }
  }
  return report;
}

bool ExNowmReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckItem& c) { return c.holds; });
}

namespace {

CheckItem equality_check(std::string name, const Rational& lhs, const Rational& rhs) {
  CheckItem item;
  item.name = std::move(name);
  item.holds = lhs == rhs;
  if (!item.holds) {
    item.detail = format_rational(lhs) + " != " + format_rational(rhs);
  }
  return item;
}

}  // namespace

ExNowmReport check_ex_nowm(const FiniteProbabilitySpace& space) {
  ExNowmReport report;
  for (int i = 1; i <= 3; ++i) {
    EventExpr parallel = EventExpr::atom(setting_name(Wing::Left, i)) &&
                         EventExpr::atom(setting_name(Wing::Right, i));
    Rational p_parallel = prob(space, parallel);
    for (Wing w : {Wing::Left, Wing::Right}) {
      EventExpr plus = EventExpr::atom(outcome_name(w, i, Outcome::Plus));
      EventExpr minus = EventExpr::atom(outcome_name(w, i, Outcome::Minus));
      std::string side = setting_name(w, i);
      if (p_parallel > 0) {
        report.checks.push_back(equality_check(
            "EX " + side + ": exactly one outcome under parallel settings",
            cond_prob(space, plus, parallel) + cond_prob(space, minus, parallel),
            Rational(1)));
        report.checks.push_back(equality_check("EX " + side + ": outcomes exclusive",
                                               cond_prob(space, plus && minus, parallel),
                                               Rational(0)));
      } else {
        CheckItem vac;
        vac.name = "EX " + side + ": parallel settings never chosen, vacuous";
        vac.holds = true;
        report.checks.push_back(vac);
      }
      // NOWM is unconditional: no outcome mass outside the matching setting.
      EventExpr setting = EventExpr::atom(side);
      report.checks.push_back(equality_check("NOWM " + side + "+",
                                             prob(space, plus && !setting), Rational(0)));
      report.checks.push_back(equality_check("NOWM " + side + "-",
                                             prob(space, minus && !setting), Rational(0)));
    }
  }
  return report;
}

ExNowmReport check_ex_nowm(const HiddenVariableModel& m) {
  return check_ex_nowm(model_to_space(m));
}

HiddenVariableModel uniform_model() {
  HiddenVariableModel m;
  m.cause_dist.fill(make_rational(1, 8));
  m.policy = SettingPolicy::uniform();
  m.response = ResponseRule::mth();
  return m;
}

HiddenVariableModel point_mass_model(const CauseAssignment& c) {
  HiddenVariableModel m;
  m.cause_dist.fill(0);
  m.cause_dist[static_cast<std::size_t>(c.index())] = 1;
  m.policy = SettingPolicy::uniform();
  m.response = ResponseRule::mth();
  return m;
}

HiddenVariableModel anticorrelated_model() {
  HiddenVariableModel m;
  m.cause_dist.fill(0);
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment a = CauseAssignment::from_index(c);
    if (a.c33 == !a.c11) m.cause_dist[static_cast<std::size_t>(c)] = make_rational(1, 4);
  }
  m.policy = SettingPolicy::uniform();
  m.response = ResponseRule::mth();
  return m;
}

HiddenVariableModel szabo_standin() {
  // Two policy rows keyed by the parity of (C11, C22): each single literal
  // sees both rows with equal weight, so atom-level checks pass, while the
  // conjunction C11 & C22 pins the row down.
  std::array<Rational, kNumPairs> flat;
  flat.fill(make_rational(1, 9));
  std::array<Rational, kNumPairs> tilted = flat;
  tilted[static_cast<std::size_t>(pair_index(1, 1))] = make_rational(1, 6);
  tilted[static_cast<std::size_t>(pair_index(3, 3))] = make_rational(1, 18);

  std::array<std::array<Rational, kNumPairs>, kNumAssignments> rows;
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment a = CauseAssignment::from_index(c);
    rows[static_cast<std::size_t>(c)] = (a.c11 == a.c22) ? flat : tilted;
  }

  HiddenVariableModel m;
  m.cause_dist.fill(make_rational(1, 8));
  m.policy = SettingPolicy::conditional(rows);
  m.response = ResponseRule::mth();
  return m;
}

HiddenVariableModel hard_conspiracy_model() {
  std::array<std::array<Rational, kNumPairs>, kNumAssignments> rows{};
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment a = CauseAssignment::from_index(c);
    auto& row = rows[static_cast<std::size_t>(c)];
    row.fill(0);
    row[static_cast<std::size_t>(a.c11 ? pair_index(1, 2) : pair_index(2, 3))] = 1;
  }
  HiddenVariableModel m;
  m.cause_dist.fill(make_rational(1, 8));
  m.policy = SettingPolicy::conditional(rows);
  m.response = ResponseRule::mth();
  return m;
}

HiddenVariableModel soft_conspiracy_model() {
  std::array<std::array<Rational, kNumPairs>, kNumAssignments> rows;
  for (int c = 0; c < kNumAssignments; ++c) {
    CauseAssignment a = CauseAssignment::from_index(c);
    auto& row = rows[static_cast<std::size_t>(c)];
    row.fill(make_rational(1, 9));
    Rational delta = make_rational(1, 18);
    int up = a.c11 ? pair_index(1, 2) : pair_index(2, 3);
    int down = a.c11 ? pair_index(2, 3) : pair_index(1, 2);
    row[static_cast<std::size_t>(up)] += delta;
    row[static_cast<std::size_t>(down)] -= delta;
  }
  HiddenVariableModel m;
  m.cause_dist.fill(make_rational(1, 8));
  m.policy = SettingPolicy::conditional(rows);
  m.response = ResponseRule::mth();
  return m;
}

namespace {

std::string outcome_pair_string(const ResponseOutcome& out) {
  std::string s;
  s += out.left ? outcome_char(*out.left) : '.';
  s += out.right ? outcome_char(*out.right) : '.';
  return s;
}

ResponseOutcome outcome_pair_parse(const std::string& s) {
  if (s.size() != 2 || s.find_first_not_of("+-.") != std::string::npos) {
    throw ParseError("response cell must be two characters of +/-/., got: " + s);
  }
  ResponseOutcome out;
  if (s[0] != '.') out.left = outcome_from_char(s[0]);
  if (s[1] != '.') out.right = outcome_from_char(s[1]);
  return out;
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::vector<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ParseError("unknown model field: " + it.key());
    }
  }
}

}  // namespace

nlohmann::json model_to_json(const HiddenVariableModel& m) {
  nlohmann::json j;
  j["version"] = 1;
  nlohmann::json dist = nlohmann::json::array();
  for (const auto& q : m.cause_dist) dist.push_back(format_rational(q));
  j["cause_dist"] = dist;

  // One row per setting pair: the unconditional probability followed by the
  // eight assignment-conditional probabilities.
  nlohmann::json policy = nlohmann::json::array();
  for (int p = 0; p < kNumPairs; ++p) {
    nlohmann::json row = nlohmann::json::array();
    Rational unconditional = 0;
    for (int c = 0; c < kNumAssignments; ++c) {
      unconditional += m.cause_dist[static_cast<std::size_t>(c)] * m.policy.prob(p, c);
    }
    row.push_back(format_rational(unconditional));
    for (int c = 0; c < kNumAssignments; ++c) {
      row.push_back(format_rational(m.policy.prob(p, c)));
    }
    policy.push_back(std::move(row));
  }
  j["policy"] = policy;

  if (m.response.is_mth()) {
    j["response"] = "mth";
  } else {
    nlohmann::json table;
    for (int p = 0; p < kNumPairs; ++p) {
      nlohmann::json cells = nlohmann::json::array();
      for (int c = 0; c < kNumAssignments; ++c) {
        cells.push_back(outcome_pair_string(
            m.response.outcomes()[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)]));
      }
      table[pair_name(pair_from_index(p))] = std::move(cells);
    }
    j["response"] = table;
  }
  return j;
}

HiddenVariableModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model document must be a JSON object");
  reject_unknown_keys(j, {"version", "cause_dist", "policy", "response"});
  if (!j.contains("version") || j.at("version") != 1) {
    throw ParseError("model document requires version 1");
  }

  HiddenVariableModel m;
  const auto& dist = j.at("cause_dist");
  if (!dist.is_array() || dist.size() != kNumAssignments) {
    throw ParseError("cause_dist must be an array of 8 rationals");
  }
  for (int c = 0; c < kNumAssignments; ++c) {
    m.cause_dist[static_cast<std::size_t>(c)] =
        parse_rational(dist[static_cast<std::size_t>(c)].get<std::string>());
  }

  const auto& policy = j.at("policy");
  if (!policy.is_array() || policy.size() != kNumPairs) {
    throw ParseError("policy must be an array of 9 rows");
  }
  std::array<std::array<Rational, kNumPairs>, kNumAssignments> rows;
  for (int p = 0; p < kNumPairs; ++p) {
    const auto& row = policy[static_cast<std::size_t>(p)];
    if (!row.is_array() || row.size() != 1 + kNumAssignments) {
      throw ParseError("each policy row must hold 1+8 rationals");
    }
    Rational declared = parse_rational(row[0].get<std::string>());
    Rational computed = 0;
    for (int c = 0; c < kNumAssignments; ++c) {
      Rational q = parse_rational(row[static_cast<std::size_t>(c) + 1].get<std::string>());
      rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] = q;
      computed += m.cause_dist[static_cast<std::size_t>(c)] * q;
    }
    if (declared != computed) {
      throw InvalidModel("policy row " + pair_name(pair_from_index(p)) +
                         ": unconditional entry " + format_rational(declared) +
                         " does not match the mixture " + format_rational(computed));
    }
  }
  m.policy = SettingPolicy::conditional(rows);

  const auto& response = j.at("response");
  if (response.is_string() && response.get<std::string>() == "mth") {
    m.response = ResponseRule::mth();
  } else if (response.is_object()) {
    ResponseTable table{};
    for (int p = 0; p < kNumPairs; ++p) {
      std::string key = pair_name(pair_from_index(p));
      if (!response.contains(key)) throw ParseError("response table missing pair " + key);
      const auto& cells = response.at(key);
      if (!cells.is_array() || cells.size() != kNumAssignments) {
        throw ParseError("response row " + key + " must hold 8 cells");
      }
      for (int c = 0; c < kNumAssignments; ++c) {
        table[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] =
            outcome_pair_parse(cells[static_cast<std::size_t>(c)].get<std::string>());
      }
    }
    m.response = ResponseRule::table(table);
  } else {
    throw ParseError("response must be \"mth\" or a table object");
  }

  m.validate();
  return m;
}

}  // namespace bellwright::models
