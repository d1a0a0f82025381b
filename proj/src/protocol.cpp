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

#include "protoscope/protocol.hpp"

#include <algorithm>

namespace protoscope {

std::string_view to_string(ChannelClass c) {
  switch (c) {
    case ChannelClass::insecure: return "insecure";
    case ChannelClass::authenticated: return "authenticated";
    case ChannelClass::confidential_authenticated: return "confidential_authenticated";
    case ChannelClass::out_of_band_keypad: return "out_of_band_keypad";
  }
  return "?";
}

std::string_view to_string(TrustProperty p) {
  switch (p) {
    case TrustProperty::none: return "none";
    case TrustProperty::authenticity: return "authenticity";
    case TrustProperty::confidentiality: return "confidentiality";
    case TrustProperty::integrity: return "integrity";
    case TrustProperty::uniqueness: return "uniqueness";
  }
  return "?";
}

std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::observe_keypad_input: return "observe_keypad_input";
    case Capability::eavesdrop_wired: return "eavesdrop_wired";
    case Capability::eavesdrop_wireless: return "eavesdrop_wireless";
    case Capability::block_messages: return "block_messages";
    case Capability::inject_messages: return "inject_messages";
    case Capability::forge_sender: return "forge_sender";
    case Capability::know_public_directory: return "know_public_directory";
    case Capability::forge_mac_realtime: return "forge_mac_realtime";
  }
  return "?";
}

std::optional<ChannelClass> parse_channel(std::string_view s) {
  for (auto c : {ChannelClass::insecure, ChannelClass::authenticated, ChannelClass::confidential_authenticated,
                 ChannelClass::out_of_band_keypad})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<TrustProperty> parse_property(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (auto p : {TrustProperty::none, TrustProperty::authenticity, TrustProperty::confidentiality,
                 TrustProperty::integrity, TrustProperty::uniqueness})
    if (to_string(p) == lower) return p;
  return std::nullopt;
}

std::optional<Capability> parse_capability(std::string_view s) {
  for (auto c : {Capability::observe_keypad_input, Capability::eavesdrop_wired, Capability::eavesdrop_wireless,
                 Capability::block_messages, Capability::inject_messages, Capability::forge_sender,
                 Capability::know_public_directory, Capability::forge_mac_realtime})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

bool base_grants(Capability c) {
  switch (c) {
    case Capability::eavesdrop_wired:
    case Capability::eavesdrop_wireless:
    case Capability::block_messages:
    case Capability::inject_messages:
    case Capability::forge_sender:
      return true;
    default:
      return false;
  }
}

std::string CapabilityDelta::str() const {
  std::string out = sign == Sign::plus ? "+" : "-";
  out += to_string(capability);
  if (!directory.empty()) {
    out += '(';
    for (std::size_t i = 0; i < directory.size(); ++i) out += (i ? "," : "") + directory[i];
    out += ')';
  }
  if (scope) out += " on " + *scope;
  return out;
}

namespace {

std::vector<EffectiveCapability> base_set() {
  std::vector<EffectiveCapability> out;
  for (int i = 0; i <= static_cast<int>(Capability::forge_mac_realtime); ++i) {
    auto c = static_cast<Capability>(i);
    if (base_grants(c)) out.push_back({c, {}, std::nullopt});
  }
  return out;
}

void apply(std::vector<EffectiveCapability>& set, const CapabilityDelta& d, bool keep_scope) {
  std::erase_if(set, [&](const EffectiveCapability& e) { return e.capability == d.capability; });
  if (d.sign == CapabilityDelta::Sign::plus)
    set.push_back({d.capability, d.directory, keep_scope ? d.scope : std::nullopt});
}

void sort_caps(std::vector<EffectiveCapability>& set) {
  std::stable_sort(set.begin(), set.end(),
                   [](const EffectiveCapability& a, const EffectiveCapability& b) { return a.capability < b.capability; });
}

}  // namespace

std::vector<EffectiveCapability> AttackerModel::effective() const {
  auto set = base_set();
  for (const CapabilityDelta& d : deltas) {
    // Scoped removals only narrow; the capability stays in force elsewhere.
    if (d.scope && d.sign == CapabilityDelta::Sign::minus) continue;
    apply(set, d, true);
  }
  sort_caps(set);
  return set;
}

std::vector<EffectiveCapability> AttackerModel::effective_for(std::optional<ChannelClass> channel,
                                                              const std::string& element) const {
  auto set = base_set();
  for (const CapabilityDelta& d : deltas) {
    if (d.scope) {
      bool hit = *d.scope == element || (channel && *d.scope == to_string(*channel));
      if (!hit) continue;
    }
    apply(set, d, false);
  }
  sort_caps(set);
  return set;
}

bool AttackerModel::grants(Capability c) const {
  auto set = effective();
  return std::any_of(set.begin(), set.end(), [&](const EffectiveCapability& e) { return e.capability == c; });
}

std::vector<std::string> AttackerModel::directory() const {
  std::vector<std::string> out;
  for (const EffectiveCapability& e : effective())
    if (e.capability == Capability::know_public_directory)
      for (const std::string& d : e.directory)
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  return out;
}

std::string StepId::str() const {
  return minor == 0 ? std::to_string(major) : std::to_string(major) + "." + std::to_string(minor);
}

const Element* StepSpec::element(const std::string& n) const {
  for (const Element& e : elements)
    if (e.name == n) return &e;
  return nullptr;
}

std::string describe(const Query& q) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SecrecyQuery>) return "secrecy " + v.target.str();
        else if constexpr (std::is_same_v<T, AuthQuery>) return "auth " + v.claimant + " " + v.peer + " on " + v.element;
        else return "unique " + v.element;
      },
      q);
}

const Principal* ProtocolSpec::principal(const std::string& id) const {
  for (const Principal& p : principals)
    if (p.id == id) return &p;
  return nullptr;
}

const StepSpec* ProtocolSpec::step(StepId id) const {
  for (const StepSpec& s : steps)
    if (s.id == id) return &s;
  return nullptr;
}

std::size_t ProtocolSpec::max_term_depth() const {
  std::size_t d = 1;
  for (const Principal& p : principals)
    for (const Term& t : p.initial_knowledge) d = std::max(d, t.depth());
  for (const Term& t : public_terms) d = std::max(d, t.depth());
  for (const StepSpec& s : steps)
    for (const Element& e : s.elements) {
      d = std::max(d, e.expr.depth());
      if (auto it = symbols.find(e.name); it != symbols.end() && it->second.definition)
        d = std::max(d, it->second.definition->depth());
    }
  for (const Query& q : queries)
    if (auto* s = std::get_if<SecrecyQuery>(&q)) d = std::max(d, s->target.depth());
  return d;
}

static std::string pos_prefix(SourcePos p) {
  return "line " + std::to_string(p.line) + ", col " + std::to_string(p.col) + ": ";
}

SyntaxError::SyntaxError(SourcePos pos, std::string expected)
    : SpecError(pos_prefix(pos) + "syntax error, expected " + expected, pos), expected_(std::move(expected)) {}

CausalityError::CausalityError(SourcePos pos, StepId step, std::string element, const std::string& detail)
    : SpecError(pos_prefix(pos) + "causality error at step " + step.str() + ", element " + element + ": " + detail,
                pos),
      step_(step),
      element_(std::move(element)) {}

UnknownCapability::UnknownCapability(SourcePos pos, std::string name)
    : SpecError(pos_prefix(pos) + "unknown capability '" + name + "'", pos), name_(std::move(name)) {}

DanglingReference::DanglingReference(SourcePos pos, std::string reference, const std::string& detail)
    : SpecError(pos_prefix(pos) + "dangling reference '" + reference + "': " + detail, pos),
      reference_(std::move(reference)) {}

}  // namespace protoscope
