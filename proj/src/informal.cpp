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

#include "protoscope/informal.hpp"

#include <algorithm>

namespace protoscope {

std::string_view to_string(DefeatCondition c) {
  switch (c) {
    case DefeatCondition::on_keypad_provenance: return "on_keypad_provenance";
    case DefeatCondition::on_insecure_channel: return "on_insecure_channel";
    case DefeatCondition::on_authenticated_channel: return "on_authenticated_channel";
    case DefeatCondition::always: return "always";
    case DefeatCondition::element_in_directory: return "element_in_directory";
  }
  return "?";
}

std::optional<DefeatCondition> parse_condition(std::string_view s) {
  for (auto c : {DefeatCondition::on_keypad_provenance, DefeatCondition::on_insecure_channel,
                 DefeatCondition::on_authenticated_channel, DefeatCondition::always,
                 DefeatCondition::element_in_directory})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

bool has(const std::vector<TrustProperty>& v, TrustProperty p) { return std::find(v.begin(), v.end(), p) != v.end(); }

// A key is trusted when only trusted principals can hold it from the start:
// it is generated by a trusted principal or initially known only to trusted
// ones.
bool trusted_key(const ProtocolSpec& spec, const Term& key) {
  auto atoms = atoms_of(key);
  if (atoms.empty()) return false;
  for (const Term& a : atoms) {
    auto sym = spec.symbols.find(a.name());
    if (sym == spec.symbols.end()) return false;
    if (sym->second.kind == Symbol::Kind::fresh_atom) {
      const Principal* p = spec.principal(sym->second.owner);
      if (!p || !p->trusted) return false;
      continue;
    }
    if (sym->second.kind != Symbol::Kind::global_atom) return false;
    for (const Term& pub : spec.public_terms)
      for (const Term& pa : atoms_of(pub))
        if (pa.name() == a.name()) return false;
    bool held = false;
    for (const Principal& p : spec.principals)
      for (const Term& t : p.initial_knowledge)
        for (const Term& ta : atoms_of(t))
          if (ta.name() == a.name()) {
            if (!p.trusted) return false;
            held = true;
          }
    if (!held) return false;
  }
  return true;
}

Term definition_of(const ProtocolSpec& spec, const Term& expr) {
  if (expr.is_atom())
    if (auto it = spec.symbols.find(expr.name()); it != spec.symbols.end() && it->second.definition)
      return *it->second.definition;
  return expr;
}

}  // namespace

RequirementTable build_requirement_table(const ProtocolSpec& spec) {
  RequirementTable table;
  for (const StepSpec& s : spec.steps) {
    const std::size_t first = table.rows.size();
    for (const Element& e : s.elements) {
      RequirementRow row{s.id, e.name, {}, e.provenance, s.channel, {}};
      for (const Requirement& r : s.requirements)
        if (r.element == e.name) row.properties = r.properties;
      table.rows.push_back(std::move(row));
    }
    // Step-level addition: a MAC under a trusted key authenticates the other
    // elements of the step it covers.
    for (const Element& e : s.elements) {
      Term def = definition_of(spec, e.expr);
      if (def.kind() != TermKind::mac || !trusted_key(spec, def.arg(1))) continue;
      auto covered = atoms_of(def.arg(0));
      for (std::size_t i = first; i < table.rows.size(); ++i) {
        RequirementRow& row = table.rows[i];
        if (row.element == e.name) continue;
        const Element* x = s.element(row.element);
        bool in_payload = std::any_of(covered.begin(), covered.end(), [&](const Term& a) {
          return a.name() == row.element || a == x->expr;
        });
        if (!in_payload) continue;
        if (!has(row.properties, TrustProperty::authenticity)) row.properties.push_back(TrustProperty::authenticity);
        if (!has(row.assured, TrustProperty::authenticity)) row.assured.push_back(TrustProperty::authenticity);
      }
    }
  }
  return table;
}

std::vector<DefeatRule> default_defeat_rules() {
  using C = Capability;
  using P = TrustProperty;
  using D = DefeatCondition;
  return {
      {"keypad-observation", C::observe_keypad_input, P::confidentiality, D::on_keypad_provenance},
      {"wired-eavesdropping", C::eavesdrop_wired, P::confidentiality, D::on_insecure_channel},
      {"wireless-eavesdropping", C::eavesdrop_wireless, P::confidentiality, D::on_insecure_channel},
      {"sender-forgery", C::forge_sender, P::authenticity, D::on_insecure_channel},
      {"message-injection-integrity", C::inject_messages, P::integrity, D::on_insecure_channel},
      {"message-injection-uniqueness", C::inject_messages, P::uniqueness, D::on_insecure_channel},
      {"public-directory", C::know_public_directory, P::confidentiality, D::element_in_directory},
      {"realtime-mac-forgery", C::forge_mac_realtime, P::authenticity, D::always},
  };
}

bool DefeatRule::defeats_row(const RequirementRow& row, TrustProperty property, const EffectiveCapability& cap) const {
  if (cap.capability != capability || property != defeats) return false;
  switch (condition) {
    case DefeatCondition::on_keypad_provenance:
      return row.provenance.find("keypad") != std::string::npos;
    case DefeatCondition::on_insecure_channel:
      return row.channel == ChannelClass::insecure && !has(row.assured, property);
    case DefeatCondition::on_authenticated_channel:
      return row.channel == ChannelClass::authenticated && !has(row.assured, property);
    case DefeatCondition::always:
      return true;
    case DefeatCondition::element_in_directory:
      return std::find(cap.directory.begin(), cap.directory.end(), row.element) != cap.directory.end();
  }
  return false;
}

namespace {

std::string explain(const RequirementRow& row, TrustProperty p, const DefeatRule& rule) {
  std::string why;
  switch (rule.condition) {
    case DefeatCondition::on_keypad_provenance: why = "the element is entered via a keypad"; break;
    case DefeatCondition::on_insecure_channel: why = "the element travels over an insecure channel"; break;
    case DefeatCondition::on_authenticated_channel: why = "the element travels over an authenticated channel"; break;
    case DefeatCondition::always: why = "the capability applies unconditionally"; break;
    case DefeatCondition::element_in_directory: why = "the element is listed in a public directory"; break;
  }
  return "step " + row.step.str() + ": " + row.element + " requires " + std::string(to_string(p)) +
         ", but the attacker capability " + std::string(to_string(rule.capability)) + " defeats it (" + why + ")";
}

}  // namespace

ConflictReport check_conflicts(const RequirementTable& table, const AttackerModel& attacker,
                               const std::vector<DefeatRule>& rules) {
  ConflictReport report;
  for (const RequirementRow& row : table.rows) {
    auto caps = attacker.effective_for(row.channel, row.element);
    std::vector<TrustProperty> props = row.properties;
    std::sort(props.begin(), props.end());
    for (TrustProperty p : props) {
      if (p == TrustProperty::none) continue;
      for (const EffectiveCapability& cap : caps) {
        auto hit = std::find_if(rules.begin(), rules.end(),
                                [&](const DefeatRule& r) { return r.defeats_row(row, p, cap); });
        if (hit == rules.end()) continue;
        report.conflicts.push_back({row.step, row.element, p, cap.capability, hit->name, explain(row, p, *hit)});
      }
    }
  }
  report.verdict = report.conflicts.empty() ? ConflictReport::Verdict::pass : ConflictReport::Verdict::fail;
  return report;
}

}  // namespace protoscope
