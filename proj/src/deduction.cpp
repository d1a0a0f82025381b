// Copyright 2026 The Protoscope Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "protoscope/deduction.hpp"

#include <algorithm>
#include <functional>

namespace protoscope {

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    out.insert(t.name());
    return;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) collect_vars(t.arg(i), out);
}

// Premise order used for matching: the first compound premise leads, since it
// binds the most variables against the explicit member set.
std::vector<Term> ordered_premises(const DeductionRule& r) {
  std::vector<Term> out = r.premises;
  auto major = std::find_if(out.begin(), out.end(), [](const Term& p) { return p.is_compound(); });
  if (major != out.end()) std::rotate(out.begin(), major, major + 1);
  return out;
}

using SolutionFn = std::function<bool(const Substitution&)>;

}  // namespace

bool match(const Term& pattern, const Term& t, Substitution& subst) {
  if (pattern.is_var()) {
    auto [it, fresh] = subst.try_emplace(pattern.name(), t);
    return fresh || it->second == t;
  }
  if (pattern.kind() != t.kind()) return false;
  if (pattern.is_atom()) return pattern == t;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match(pattern.arg(i), t.arg(i), subst)) return false;
  return true;
}

Term instantiate(const Term& pattern, const Substitution& subst) {
  switch (pattern.kind()) {
    case TermKind::var: {
      auto it = subst.find(pattern.name());
      return it == subst.end() ? pattern : it->second;
    }
    case TermKind::atom: return pattern;
    case TermKind::pair: return Term::pair(instantiate(pattern.arg(0), subst), instantiate(pattern.arg(1), subst));
    case TermKind::senc: return Term::senc(instantiate(pattern.arg(0), subst), instantiate(pattern.arg(1), subst));
    case TermKind::mac: return Term::mac(instantiate(pattern.arg(0), subst), instantiate(pattern.arg(1), subst));
    case TermKind::hash: return Term::hash(instantiate(pattern.arg(0), subst));
    case TermKind::xor_mask:
      return Term::xor_mask(instantiate(pattern.arg(0), subst), instantiate(pattern.arg(1), subst));
  }
  return pattern;
}

DeductionRule::DeductionRule(std::string n, std::vector<Term> ps, Term c)
    : name(std::move(n)), premises(std::move(ps)), conclusion(std::move(c)) {
  std::set<std::string> in_premises, in_conclusion;
  for (const Term& p : premises) collect_vars(p, in_premises);
  collect_vars(conclusion, in_conclusion);
  for (const std::string& v : in_conclusion)
    if (!in_premises.count(v))
      throw std::invalid_argument("rule " + name + ": conclusion variable ?" + v + " not bound by a premise");
}

std::vector<DeductionRule> standard_rules() {
  const Term m = Term::var("m"), k = Term::var("k"), l = Term::var("l"), r = Term::var("r");
  const Term m2 = Term::var("m2");
  return {
      {"pair", {l, r}, Term::pair(l, r)},
      {"unpair-left", {Term::pair(l, r)}, l},
      {"unpair-right", {Term::pair(l, r)}, r},
      {"senc", {m, k}, Term::senc(m, k)},
      {"sdec", {Term::senc(m, k), k}, m},
      {"mac-construct", {m, k}, Term::mac(m, k)},
      {"hash-construct", {m}, Term::hash(m)},
      {"xor-mask-construct", {m, k}, Term::xor_mask(m, k)},
      {"xor-recover-key", {m, Term::xor_mask(m, k)}, k},
      {"xor-recover-plain", {k, Term::xor_mask(m, k)}, m},
      {"xor-reuse", {Term::xor_mask(m, k), m, m2}, Term::xor_mask(m2, k)},
  };
}

ClosureBudgetExceeded::ClosureBudgetExceeded(std::size_t ceiling)
    : std::runtime_error("closure exceeded " + std::to_string(ceiling) + " terms"), ceiling_(ceiling) {}

// Enumerates substitutions satisfying premises[i..] given `subst`. Ground
// premises are decided by membership; open ones are matched against the first
// `limit` explicit members. Stops as soon as `fn` returns true.
static bool enumerate(const KnowledgeSet& kb, const std::vector<Term>& premises, std::size_t i,
                      const Substitution& subst, std::size_t limit,
                      const std::function<bool(const Term&, std::size_t)>& member_of,
                      const SolutionFn& fn) {
  if (i == premises.size()) return fn(subst);
  const Term p = instantiate(premises[i], subst);
  if (p.ground()) {
    if (!member_of(p, limit)) return false;
    return enumerate(kb, premises, i + 1, subst, limit, member_of, fn);
  }
  const auto& members = kb.analyzed();
  for (std::size_t j = 0; j < limit && j < members.size(); ++j) {
    Substitution next = subst;
    if (!match(p, members[j], next)) continue;
    if (enumerate(kb, premises, i + 1, next, limit, member_of, fn)) return true;
  }
  return false;
}

bool KnowledgeSet::insert(const Term& t, Witness w) {
  if (position_.count(t)) return false;
  position_.emplace(t, members_.size());
  members_.push_back(t);
  if (!w.rule.empty()) witnesses_.emplace(t, std::move(w));
  return true;
}

bool KnowledgeSet::contains_before(const Term& t, std::size_t limit, std::set<Term>& guard) const {
  if (auto it = position_.find(t); it != position_.end() && it->second < limit) return true;
  if (!t.ground() || t.depth() > depth_bound_ || guard.count(t)) return false;
  guard.insert(t);
  auto member_of = [&](const Term& p, std::size_t lim) { return contains_before(p, lim, guard); };
  bool found = false;
  for (const DeductionRule& r : rules_) {
    if (r.is_analysis()) continue;
    Substitution s;
    if (!match(r.conclusion, t, s)) continue;
    if (enumerate(*this, ordered_premises(r), 0, s, limit, member_of, [](const Substitution&) { return true; })) {
      found = true;
      break;
    }
  }
  guard.erase(t);
  return found;
}

bool KnowledgeSet::contains(const Term& t) const {
  std::set<Term> guard;
  return contains_before(t, members_.size(), guard);
}

void KnowledgeSet::saturate(std::size_t ceiling) {
  std::vector<std::pair<const DeductionRule*, std::vector<Term>>> analysis;
  for (const DeductionRule& r : rules_)
    if (r.is_analysis()) analysis.emplace_back(&r, ordered_premises(r));

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [rule, premises] : analysis) {
      for (std::size_t j = 0; j < members_.size(); ++j) {
        Substitution s;
        if (!match(premises.front(), members_[j], s)) continue;
        const std::size_t limit = members_.size();
        std::vector<std::pair<Term, Witness>> found;
        std::set<Term> guard;
        auto member_of = [&](const Term& p, std::size_t lim) { return contains_before(p, lim, guard); };
        enumerate(*this, premises, 1, s, limit, member_of, [&](const Substitution& full) {
          Witness w{rule->name, {}};
          for (const Term& p : rule->premises) w.premises.push_back(instantiate(p, full));
          found.emplace_back(instantiate(rule->conclusion, full), std::move(w));
          return false;
        });
        for (auto& [concl, w] : found) {
          if (concl.depth() > depth_bound_ || !concl.ground()) continue;
          if (insert(concl, std::move(w))) {
            changed = true;
            if (members_.size() > ceiling) throw ClosureBudgetExceeded(ceiling);
          }
        }
      }
    }
  }
}

KnowledgeSet close(const std::set<Term>& base, const std::vector<DeductionRule>& rules, std::size_t depth_bound,
                   std::size_t ceiling) {
  KnowledgeSet kb;
  kb.base_ = base;
  kb.rules_ = rules;
  kb.depth_bound_ = depth_bound;
  for (const Term& t : base) kb.insert(t, {});
  if (kb.members_.size() > ceiling) throw ClosureBudgetExceeded(ceiling);
  kb.saturate(ceiling);
  return kb;
}

KnowledgeSet KnowledgeSet::extend(std::span<const Term> more, std::size_t ceiling) const {
  KnowledgeSet kb = *this;
  std::set<Term> fresh;
  for (const Term& t : more)
    if (kb.base_.insert(t).second) fresh.insert(t);
  if (fresh.empty()) return kb;
  for (const Term& t : fresh) {
    // A term already derived becomes a base fact.
    kb.witnesses_.erase(t);
    kb.insert(t, {});
  }
  if (kb.members_.size() > ceiling) throw ClosureBudgetExceeded(ceiling);
  kb.saturate(ceiling);
  return kb;
}

std::vector<Term> KnowledgeSet::atoms() const {
  std::vector<Term> out;
  for (const Term& t : members_)
    if (t.is_atom()) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Derivation> KnowledgeSet::derive_before(const Term& t, std::size_t limit, std::set<Term>& guard) const {
  if (auto it = position_.find(t); it != position_.end() && it->second < limit) {
    if (base_.count(t)) return Derivation{t, {}, {}};
    const Witness& w = witnesses_.at(t);
    Derivation d{t, w.rule, {}};
    for (const Term& p : w.premises) {
      std::set<Term> inner;
      auto sub = derive_before(p, it->second, inner);
      if (!sub) return std::nullopt;
      d.premises.push_back(std::move(*sub));
    }
    return d;
  }
  if (!t.ground() || t.depth() > depth_bound_ || guard.count(t)) return std::nullopt;
  guard.insert(t);
  auto member_of = [&](const Term& p, std::size_t lim) { return contains_before(p, lim, guard); };
  std::optional<Derivation> result;
  for (const DeductionRule& r : rules_) {
    if (r.is_analysis()) continue;
    Substitution s;
    if (!match(r.conclusion, t, s)) continue;
    Substitution solution;
    if (!enumerate(*this, ordered_premises(r), 0, s, limit, member_of, [&](const Substitution& full) {
          solution = full;
          return true;
        }))
      continue;
    Derivation d{t, r.name, {}};
    bool ok = true;
    for (const Term& p : r.premises) {
      auto sub = derive_before(instantiate(p, solution), limit, guard);
      if (!sub) {
        ok = false;
        break;
      }
      d.premises.push_back(std::move(*sub));
    }
    if (ok) {
      result = std::move(d);
      break;
    }
  }
  guard.erase(t);
  return result;
}

std::optional<Derivation> KnowledgeSet::derivation(const Term& t) const {
  std::set<Term> guard;
  return derive_before(t, members_.size(), guard);
}

DerivableResult derivable(const KnowledgeSet& kb, const Term& goal) {
  DerivableResult r;
  r.derivation = kb.derivation(goal);
  r.derivable = r.derivation.has_value();
  return r;
}

bool replay_derivation(const Derivation& d, const std::set<Term>& base, const std::vector<DeductionRule>& rules) {
  if (d.rule.empty()) return d.premises.empty() && base.count(d.conclusion) > 0;
  auto rule = std::find_if(rules.begin(), rules.end(), [&](const DeductionRule& r) { return r.name == d.rule; });
  if (rule == rules.end() || rule->premises.size() != d.premises.size()) return false;
  Substitution s;
  for (std::size_t i = 0; i < d.premises.size(); ++i)
    if (!match(rule->premises[i], d.premises[i].conclusion, s)) return false;
  if (!match(rule->conclusion, d.conclusion, s)) return false;
  return std::all_of(d.premises.begin(), d.premises.end(),
                     [&](const Derivation& p) { return replay_derivation(p, base, rules); });
}

}  // namespace protoscope
