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

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "protoscope/engine.hpp"
#include "protoscope/informal.hpp"
#include "protoscope/protocol.hpp"
#include "protoscope/report.hpp"

namespace protoscope {

class CorpusCorrupt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spec run under extra capability overrides, with its own goldens.
struct CaseVariant {
  std::string name;
  std::filesystem::path spec_path;
  ProtocolSpec spec;
  std::vector<CapabilityDelta> overrides;
  ConflictReport expected_phase1;
  /// Absent when phase 2 is not expected to run (phase 1 fails).
  std::optional<VerificationResult> expected_phase2;
};

struct CaseStudy {
  std::string name;
  std::filesystem::path dir;
  std::filesystem::path spec_path;
  ProtocolSpec spec;
  ConflictReport expected_phase1;
  std::optional<VerificationResult> expected_phase2;
  /// Golden text traces keyed by file name.
  std::map<std::string, std::string> traces;
  std::vector<CaseVariant> variants;
};

std::vector<std::string> case_names();
std::filesystem::path default_cases_dir();

/// Loads and validates one bundled study. Violated goldens must come with a
/// byte-identical text trace file that replays.
CaseStudy load_case(const std::string& name, const std::filesystem::path& cases_dir = default_cases_dir());

/// File name of the golden text trace for a violated query.
std::string trace_file_name(const Query& q);

/// Phase 1 with optional runtime capability overrides.
ConflictReport run_phase1(const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides = {},
                          const std::vector<DefeatRule>& rules = default_defeat_rules());
VerificationResult run_phase2(const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides = {},
                              const SessionConfig& config = {});

struct StudyOutcome {
  std::string name;
  bool passed = false;
  std::vector<std::string> mismatches;
};

struct CorpusReport {
  std::vector<StudyOutcome> studies;
  bool passed() const;
};

/// Runs every study (and variant) and compares with the goldens. Phase 2 only
/// runs when the golden expects it.
CorpusReport run_all(const std::filesystem::path& cases_dir = default_cases_dir());

/// Recomputes and writes every golden file for `name`.
void write_goldens(const std::string& name, const std::filesystem::path& cases_dir = default_cases_dir());

}  // namespace protoscope
