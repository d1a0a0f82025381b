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

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "protoscope/engine.hpp"
#include "protoscope/informal.hpp"

namespace protoscope {

using Json = nlohmann::ordered_json;

class ReportFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Term& t);
Term term_from_json(const Json& j);
Json to_json(const Query& q);
Query query_from_json(const Json& j);

/// {verdict, conflicts:[{step, element, property, capability, rule, explanation}]}
Json to_json(const ConflictReport& r);
ConflictReport conflict_report_from_json(const Json& j);
std::string render_text(const ConflictReport& r);

Json to_json(const TraceEvent& e);
TraceEvent event_from_json(const Json& j);
Json to_json(const AttackTrace& t);
AttackTrace trace_from_json(const Json& j);
/// One event per line, each prefixed by its kind.
std::string render_text(const AttackTrace& t);
std::string render_event(const TraceEvent& e);

/// Deterministic: wall time is left out of the JSON form.
Json to_json(const VerificationResult& r);
VerificationResult verification_from_json(const Json& j);
std::string render_text(const VerificationResult& r);

/// Applies a rules file to `base`: {"disable": [names], "rules": [{name,
/// capability, defeats, condition}]}. A rule named like an existing one
/// replaces it; others are appended.
std::vector<DefeatRule> apply_rule_overrides(std::vector<DefeatRule> base, const Json& j);

inline constexpr const char* kPhase1Label = "PAL1-equivalent";
inline constexpr const char* kPhase2Label = "PAL2-equivalent";

}  // namespace protoscope
