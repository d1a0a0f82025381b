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

#include <optional>
#include <string>
#include <vector>

#include "protoscope/protocol.hpp"

namespace protoscope {

struct RequirementRow {
  StepId step;
  std::string element;
  std::vector<TrustProperty> properties;
  std::string provenance;
  /// Absent for compute steps.
  std::optional<ChannelClass> channel;
  /// Properties established cryptographically within the step (a MAC under a
  /// trusted key); channel-based defeats do not apply to them.
  std::vector<TrustProperty> assured;
};

/// One row per (step, element), in step order then element order.
struct RequirementTable {
  std::vector<RequirementRow> rows;
};

enum class DefeatCondition {
  on_keypad_provenance,
  on_insecure_channel,
  on_authenticated_channel,
  always,
  element_in_directory,
};

std::string_view to_string(DefeatCondition c);
std::optional<DefeatCondition> parse_condition(std::string_view s);

struct DefeatRule {
  std::string name;
  Capability capability;
  TrustProperty defeats;
  DefeatCondition condition;

  /// Whether this rule, with `cap` in force, defeats `property` on `row`.
  bool defeats_row(const RequirementRow& row, TrustProperty property, const EffectiveCapability& cap) const;
};

struct Conflict {
  StepId step;
  std::string element;
  TrustProperty property;
  Capability capability;
  std::string rule;
  std::string explanation;
};

struct ConflictReport {
  enum class Verdict { pass, fail };
  std::vector<Conflict> conflicts;
  Verdict verdict = Verdict::pass;
};

RequirementTable build_requirement_table(const ProtocolSpec& spec);
std::vector<DefeatRule> default_defeat_rules();
ConflictReport check_conflicts(const RequirementTable& table, const AttackerModel& attacker,
                               const std::vector<DefeatRule>& rules);

}  // namespace protoscope
