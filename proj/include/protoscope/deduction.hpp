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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protoscope/term.hpp"

namespace protoscope {

using Substitution = std::map<std::string, Term>;

/// Extends `subst` so that `pattern` instantiates to `t`. On failure `subst`
/// may hold partial bindings.
bool match(const Term& pattern, const Term& t, Substitution& subst);
Term instantiate(const Term& pattern, const Substitution& subst);

/// One attacker inference: from instances of all premises, derive the
/// matching instance of the conclusion.
struct DeductionRule {
  std::string name;
  std::vector<Term> premises;
  Term conclusion;

  /// Throws std::invalid_argument if a conclusion variable is absent from
  /// every premise.
  DeductionRule(std::string name, std::vector<Term> premises, Term conclusion);

  /// Destructor-style rules conclude a bare variable.
  bool is_analysis() const { return conclusion.is_var(); }
};

/// Pairing, symmetric encryption, one-way MAC and hash, and the three
/// XorMask rules modelling keystream recovery and reuse.
std::vector<DeductionRule> standard_rules();

inline constexpr std::size_t kDefaultClosureCeiling = 100'000;

class ClosureBudgetExceeded : public std::runtime_error {
 public:
  explicit ClosureBudgetExceeded(std::size_t ceiling);
  std::size_t ceiling() const { return ceiling_; }

 private:
  std::size_t ceiling_;
};

struct Witness {
  std::string rule;
  std::vector<Term> premises;
};

/// Derivation tree. A node with an empty rule name is a base fact.
struct Derivation {
  Term conclusion;
  std::string rule;
  std::vector<Derivation> premises;
};

/// Attacker knowledge closed under a rule set up to a depth bound.
///
/// The closure is kept in two layers. `analyzed()` is the explicit set: the
/// base plus everything reachable from it by analysis (destructor) rules,
/// each non-base member carrying a witness. Terms built by synthesis rules
/// are decided on demand by `contains()`, which goes top-down through the
/// rule conclusions. Together they describe exactly the least fixpoint of
/// all rules restricted to conclusions of depth at most `depth_bound()`.
class KnowledgeSet {
 public:
  const std::set<Term>& base() const { return base_; }
  const std::vector<DeductionRule>& rules() const { return rules_; }
  std::size_t depth_bound() const { return depth_bound_; }

  /// Explicit members in insertion order, base terms first.
  const std::vector<Term>& analyzed() const { return members_; }
  const std::map<Term, Witness>& witnesses() const { return witnesses_; }

  bool contains(const Term& t) const;
  std::optional<Derivation> derivation(const Term& t) const;

  /// Closure of base() ∪ more under the same rules and bound.
  KnowledgeSet extend(std::span<const Term> more, std::size_t ceiling = kDefaultClosureCeiling) const;

  /// Ground atoms among the explicit members, in term order.
  std::vector<Term> atoms() const;

 private:
  friend KnowledgeSet close(const std::set<Term>&, const std::vector<DeductionRule>&, std::size_t,
                            std::size_t);

  bool contains_before(const Term& t, std::size_t limit, std::set<Term>& guard) const;
  bool solve(const std::vector<Term>& premises, std::size_t i, Substitution& subst, std::size_t limit,
             std::set<Term>& guard, std::vector<Term>* used) const;
  std::optional<Derivation> derive_before(const Term& t, std::size_t limit, std::set<Term>& guard) const;
  void saturate(std::size_t ceiling);
  bool insert(const Term& t, Witness w);

  std::set<Term> base_;
  std::vector<DeductionRule> rules_;
  std::size_t depth_bound_ = 0;
  std::vector<Term> members_;
  std::map<Term, std::size_t> position_;
  std::map<Term, Witness> witnesses_;
};

/// Least fixpoint of `rules` over `base`, keeping conclusions of depth at
/// most `depth_bound`. Throws ClosureBudgetExceeded when the explicit set
/// grows past `ceiling` terms.
KnowledgeSet close(const std::set<Term>& base, const std::vector<DeductionRule>& rules,
                   std::size_t depth_bound, std::size_t ceiling = kDefaultClosureCeiling);

struct DerivableResult {
  bool derivable = false;
  std::optional<Derivation> derivation;
};

DerivableResult derivable(const KnowledgeSet& kb, const Term& goal);

/// Checks a derivation bottom-up: leaves are in `base`, inner nodes are
/// instances of the named rule.
bool replay_derivation(const Derivation& d, const std::set<Term>& base,
                       const std::vector<DeductionRule>& rules);

}  // namespace protoscope
