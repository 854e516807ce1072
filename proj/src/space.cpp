#include "bellwright/space.hpp"

#include <algorithm>

#include "bellwright/errors.hpp"

namespace bellwright {

bool FiniteProbabilitySpace::has_event(const std::string& name) const {
  return extensions_.count(name) != 0;
}

const AtomMask& FiniteProbabilitySpace::extension(const std::string& name) const {
  auto it = extensions_.find(name);
  if (it == extensions_.end()) throw UndeclaredAtom(name);
  return it->second;
}

AtomMask FiniteProbabilitySpace::satisfying_atoms(const EventExpr& e) const {
  switch (e.kind()) {
    case EventExpr::Kind::Atom:
      return extension(e.atom_name());
    case EventExpr::Kind::Not: {
      AtomMask m = satisfying_atoms(e.operand());
      for (auto& bit : m) bit = !bit;
      return m;
    }
    case EventExpr::Kind::And: {
      AtomMask m = satisfying_atoms(e.lhs());
      AtomMask r = satisfying_atoms(e.rhs());
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = m[k] && r[k];
      return m;
    }
    case EventExpr::Kind::Or: {
      AtomMask m = satisfying_atoms(e.lhs());
      AtomMask r = satisfying_atoms(e.rhs());
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = m[k] || r[k];
      return m;
    }
  }
  return {};
}

Rational FiniteProbabilitySpace::mass(const AtomMask& mask) const {
  Rational total = 0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (mask[k]) total += weights_[k];
  }
  return total;
}

std::size_t SpaceBuilder::add_atom(std::string label, Rational weight) {
  labels_.push_back(std::move(label));
  weights_.push_back(std::move(weight));
  return labels_.size() - 1;
}

void SpaceBuilder::declare_event(const std::string& name,
                                 const std::vector<std::size_t>& members) {
  auto& m = members_[name];
  m.insert(m.end(), members.begin(), members.end());
}

void SpaceBuilder::add_to_event(const std::string& name, std::size_t atom) {
  members_[name].push_back(atom);
}

FiniteProbabilitySpace SpaceBuilder::build() {
  FiniteProbabilitySpace space;
  Rational total = 0;
  for (const auto& w : weights_) {
    if (w < 0) throw Error("atom weight must be nonnegative");
    total += w;
  }
  if (total != 1) throw Error("atom weights must sum to 1, got " + format_rational(total));
  space.labels_ = labels_;
  space.weights_ = weights_;
  for (const auto& [name, members] : members_) {
    AtomMask mask(labels_.size(), 0);
    for (std::size_t idx : members) {
      if (idx >= labels_.size()) throw Error("event " + name + " references unknown atom");
      mask[idx] = 1;
    }
    space.extensions_[name] = std::move(mask);
  }
  return space;
}

void validate_variable(const FiniteProbabilitySpace& space, const Variable& v) {
  if (v.value_events.empty()) throw Error("variable " + v.name + " has no values");
  std::vector<int> covered(space.atom_count(), 0);
  for (const auto& ev : v.value_events) {
    const AtomMask& mask = space.extension(ev);
    for (std::size_t k = 0; k < mask.size(); ++k) covered[k] += mask[k];
  }
  for (std::size_t k = 0; k < covered.size(); ++k) {
    if (covered[k] != 1) {
      throw Error("variable " + v.name + " values must partition the atoms; atom " +
                  space.atom_label(k) +
                  (covered[k] == 0 ? " is uncovered" : " is covered twice"));
    }
  }
}

namespace {

AtomMask all_atoms(const FiniteProbabilitySpace& space) {
  return AtomMask(space.atom_count(), 1);
}

AtomMask intersect(AtomMask a, const AtomMask& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = a[k] && b[k];
  return a;
}

}  // namespace

Rational prob(const FiniteProbabilitySpace& space, const EventExpr& e) {
  return space.mass(space.satisfying_atoms(e));
}

Rational cond_prob(const FiniteProbabilitySpace& space, const EventExpr& e,
                   const EventExpr& given) {
  AtomMask g = space.satisfying_atoms(given);
  Rational pg = space.mass(g);
  if (pg == 0) throw ZeroConditioning("conditioning event " + given.to_string() + " has probability 0");
  Rational joint = space.mass(intersect(space.satisfying_atoms(e), g));
  return joint / pg;
}

CorrelationResult correlated(const FiniteProbabilitySpace& space, const EventExpr& a,
                             const EventExpr& b, const std::optional<EventExpr>& given) {
  AtomMask g = given ? space.satisfying_atoms(*given) : all_atoms(space);
  Rational pg = space.mass(g);
  if (pg == 0) throw ZeroConditioning("conditioning event has probability 0");
  AtomMask ma = space.satisfying_atoms(a);
  AtomMask mb = space.satisfying_atoms(b);
  Rational pa = space.mass(intersect(ma, g)) / pg;
  Rational pb = space.mass(intersect(mb, g)) / pg;
  Rational pab = space.mass(intersect(intersect(ma, mb), g)) / pg;
  CorrelationResult result;
  result.delta = pab - pa * pb;
  result.correlated = result.delta != 0;
  return result;
}

bool ScreeningReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ScreeningEntry& e) { return e.status != ScreeningStatus::Fails; });
}

ScreeningReport screens_off(const FiniteProbabilitySpace& space, const Variable& v,
                            const EventExpr& a, const EventExpr& b,
                            const std::optional<EventExpr>& given) {
  validate_variable(space, v);
  AtomMask g = given ? space.satisfying_atoms(*given) : all_atoms(space);
  AtomMask ma = space.satisfying_atoms(a);
  AtomMask mb = space.satisfying_atoms(b);

  ScreeningReport report;
  for (const auto& value_event : v.value_events) {
    ScreeningEntry entry;
    entry.value = value_event;
    AtomMask gv = intersect(space.extension(value_event), g);
    Rational pgv = space.mass(gv);
    if (pgv == 0) {
      entry.status = ScreeningStatus::Vacuous;
    } else {
      Rational pa = space.mass(intersect(ma, gv)) / pgv;
      Rational pb = space.mass(intersect(mb, gv)) / pgv;
      Rational pab = space.mass(intersect(intersect(ma, mb), gv)) / pgv;
      entry.residual = pab - pa * pb;
      entry.status = entry.residual == 0 ? ScreeningStatus::Holds : ScreeningStatus::Fails;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace bellwright
