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

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protoscope {

enum class Sort { agent, nonce, key, data, constant };

std::string_view to_string(Sort s);
std::optional<Sort> parse_sort(std::string_view s);

enum class TermKind { atom, var, pair, senc, mac, hash, xor_mask };

/// Immutable symbolic message.
///
/// Terms are finite trees shared by reference; copies are cheap. Equality is
/// purely structural. `var` nodes only occur in deduction-rule patterns and
/// never in messages exchanged by principals.
class Term {
 public:
  static Term atom(std::string name, Sort sort);
  static Term var(std::string name);
  static Term pair(Term left, Term right);
  static Term senc(Term payload, Term key);
  static Term mac(Term payload, Term key);
  static Term hash(Term payload);
  static Term xor_mask(Term plain, Term key);
  /// Right-nested pair over `parts`; a single part is returned unchanged.
  static Term tuple(const std::vector<Term>& parts);

  TermKind kind() const;
  bool is_atom() const { return kind() == TermKind::atom; }
  bool is_var() const { return kind() == TermKind::var; }
  bool is_compound() const { return kind() != TermKind::atom && kind() != TermKind::var; }

  /// Atom or variable name. Empty for compound terms.
  const std::string& name() const;
  /// Atom sort. Meaningless for other kinds.
  Sort sort() const;

  std::size_t arity() const;
  const Term& arg(std::size_t i) const;

  /// Height of the tree; atoms and variables have depth 1.
  std::size_t depth() const;
  /// Number of nodes.
  std::size_t size() const;
  std::size_t hash_value() const;
  bool ground() const;

  /// DSL rendering: atoms bare, constructors as pair(a,b), senc(m,k), ...
  std::string str() const;

  friend bool operator==(const Term& a, const Term& b);
  /// Total order: size first, then kind, then name/sort, then arguments.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(TermKind k, std::string name, Sort sort, std::vector<Term> args);

  std::shared_ptr<const Node> node_;
};

std::string_view to_string(TermKind k);

/// Collects every subterm of `t` (including `t`) into `out`.
void subterms(const Term& t, std::vector<Term>& out);
/// Collects the atoms of `t`, left to right, without duplicates.
std::vector<Term> atoms_of(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash_value(); }
};

}  // namespace protoscope
