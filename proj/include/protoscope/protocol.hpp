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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "protoscope/term.hpp"

namespace protoscope {

enum class ChannelClass { insecure, authenticated, confidential_authenticated, out_of_band_keypad };

enum class TrustProperty { none, authenticity, confidentiality, integrity, uniqueness };

/// Closed attacker capability vocabulary.
enum class Capability {
  observe_keypad_input,
  eavesdrop_wired,
  eavesdrop_wireless,
  block_messages,
  inject_messages,
  forge_sender,
  know_public_directory,
  forge_mac_realtime,
};

std::string_view to_string(ChannelClass c);
std::string_view to_string(TrustProperty p);
std::string_view to_string(Capability c);
std::optional<ChannelClass> parse_channel(std::string_view s);
std::optional<TrustProperty> parse_property(std::string_view s);
std::optional<Capability> parse_capability(std::string_view s);

/// Capabilities the Dolev-Yao base model grants without any delta.
bool base_grants(Capability c);

struct CapabilityDelta {
  enum class Sign { plus, minus };
  Sign sign = Sign::plus;
  Capability capability = Capability::inject_messages;
  /// Element names, for know_public_directory only.
  std::vector<std::string> directory;
  /// Channel class name or element name the delta is restricted to.
  std::optional<std::string> scope;

  std::string str() const;
};

/// A capability in force after applying deltas to the base model.
struct EffectiveCapability {
  Capability capability;
  std::vector<std::string> directory;
  std::optional<std::string> scope;
};

struct AttackerModel {
  std::string base = "dolev_yao";
  std::vector<CapabilityDelta> deltas;

  /// Applies the deltas in order to the base grants. A delta without scope
  /// replaces every entry for its capability; a scoped minus delta removes
  /// only matching scoped entries and records an exclusion.
  std::vector<EffectiveCapability> effective() const;
  /// Capabilities in force for a row on `channel` carrying `element`.
  std::vector<EffectiveCapability> effective_for(std::optional<ChannelClass> channel,
                                                 const std::string& element) const;
  bool grants(Capability c) const;
  std::vector<std::string> directory() const;
};

struct StepId {
  int major = 0;
  int minor = 0;

  std::string str() const;
  friend auto operator<=>(const StepId&, const StepId&) = default;
};

enum class StepKind { send, compute, out_of_band };

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct Element {
  std::string name;
  Term expr;
  std::string provenance;
  SourcePos pos;
};

struct Requirement {
  std::string element;
  /// In the order written, without duplicates.
  std::vector<TrustProperty> properties;
};

struct StepSpec {
  StepId id;
  StepKind kind = StepKind::send;
  std::string sender;
  std::optional<std::string> receiver;
  /// Absent for compute steps.
  std::optional<ChannelClass> channel;
  std::vector<Element> elements;
  std::vector<Requirement> requirements;
  std::vector<std::string> fresh;
  SourcePos pos;

  const Element* element(const std::string& name) const;
};

struct Principal {
  std::string id;
  bool trusted = false;
  std::vector<Term> initial_knowledge;
};

struct SecrecyQuery {
  Term target;
};
/// Every acceptance of `element` by `peer` must be preceded by `claimant`
/// sending the same value to `peer`.
struct AuthQuery {
  std::string claimant;
  std::string peer;
  std::string element;
};
struct UniqueQuery {
  std::string element;
};
using Query = std::variant<SecrecyQuery, AuthQuery, UniqueQuery>;

/// DSL form, e.g. "secrecy k", "auth WD AP on resp", "unique ticket".
std::string describe(const Query& q);

/// What a name in a term expression denotes.
struct Symbol {
  enum class Kind { global_atom, fresh_atom, element };
  Kind kind = Kind::global_atom;
  Sort sort = Sort::data;
  /// Principal that generates (fresh) or first defines (element) the value.
  std::string owner;
  StepId defined_at;
  /// For elements, the defining expression in the owner's step.
  std::optional<Term> definition;
};

struct ProtocolSpec {
  std::string name;
  std::vector<std::string> goals;
  std::vector<Principal> principals;
  /// Terms known to everyone, the attacker included.
  std::vector<Term> public_terms;
  AttackerModel attacker;
  std::vector<StepSpec> steps;
  std::vector<Query> queries;
  std::map<std::string, Symbol> symbols;

  const Principal* principal(const std::string& id) const;
  const StepSpec* step(StepId id) const;
  /// Maximum depth over every term in the spec.
  std::size_t max_term_depth() const;
};

/// Base of every typed parse/validation failure.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& what, SourcePos pos) : std::runtime_error(what), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class SyntaxError : public SpecError {
 public:
  SyntaxError(SourcePos pos, std::string expected);
  const std::string& expected() const { return expected_; }

 private:
  std::string expected_;
};

class CausalityError : public SpecError {
 public:
  CausalityError(SourcePos pos, StepId step, std::string element, const std::string& detail);
  StepId step() const { return step_; }
  const std::string& element() const { return element_; }

 private:
  StepId step_;
  std::string element_;
};

class UnknownCapability : public SpecError {
 public:
  UnknownCapability(SourcePos pos, std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DanglingReference : public SpecError {
 public:
  DanglingReference(SourcePos pos, std::string reference, const std::string& detail);
  const std::string& reference() const { return reference_; }

 private:
  std::string reference_;
};

/// Any other violated spec invariant (duplicate principal, non-dense step
/// numbering, delta naming a capability in the wrong state, ...).
class InvalidSpec : public SpecError {
 public:
  using SpecError::SpecError;
};

}  // namespace protoscope
