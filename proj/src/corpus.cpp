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

#include "protoscope/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "protoscope/parser.hpp"

#ifndef PROTOSCOPE_CASES_DIR
#define PROTOSCOPE_CASES_DIR "cases"
#endif

namespace protoscope {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusCorrupt("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

Json read_json(const fs::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::exception& e) {
    throw CorpusCorrupt(p.string() + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct VariantDecl {
  std::string name;
  std::string spec;
  std::vector<std::string> overrides;
  SessionConfig config;
};

std::vector<VariantDecl> variant_decls(const fs::path& dir) {
  std::vector<VariantDecl> out;
  const fs::path manifest = dir / "variants.json";
  if (!fs::exists(manifest)) return out;
  const Json j = read_json(manifest);
  if (!j.is_array()) throw CorpusCorrupt(manifest.string() + ": expected an array");
  for (const Json& v : j) {
    VariantDecl d;
    try {
      d.name = v.at("name").get<std::string>();
      d.spec = v.value("spec", std::string("spec.proto-spec"));
      d.overrides = v.value("overrides", std::vector<std::string>{});
      d.config.sessions_per_role = v.value("sessions", d.config.sessions_per_role);
      if (d.config.sessions_per_role < 1) throw CorpusCorrupt(manifest.string() + ": sessions must be positive");
    } catch (const Json::exception& e) {
      throw CorpusCorrupt(manifest.string() + ": " + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

AttackerModel with_overrides(const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides) {
  AttackerModel a = spec.attacker;
  for (const CapabilityDelta& d : overrides) apply_override(a, d);
  return a;
}

ProtocolSpec load_spec(const fs::path& p) {
  try {
    return parse(read_file(p));
  } catch (const SpecError& e) {
    throw CorpusCorrupt(p.string() + ": " + e.what());
  }
}

// Goldens of one (spec, overrides) pair, files named with `prefix`.
struct Goldens {
  ConflictReport phase1;
  std::optional<VerificationResult> phase2;
  std::map<std::string, std::string> traces;
};

Goldens load_goldens(const fs::path& dir, const std::string& prefix, const ProtocolSpec& spec,
                     const std::vector<CapabilityDelta>& overrides) {
  Goldens g;
  const fs::path expected = dir / "expected";
  try {
    g.phase1 = conflict_report_from_json(read_json(expected / (prefix + "phase1.json")));
    const Json p2 = read_json(expected / (prefix + "phase2.json"));
    if (!p2.contains("not_run")) g.phase2 = verification_from_json(p2);
  } catch (const ReportFormatError& e) {
    throw CorpusCorrupt(dir.string() + ": " + e.what());
  } catch (const Json::exception& e) {
    throw CorpusCorrupt(dir.string() + ": " + e.what());
  }
  if (!g.phase2) return g;
  const ProtocolModel model = compile(spec);
  const AttackerModel attacker = with_overrides(spec, overrides);
  for (const QueryVerdict& v : g.phase2->verdicts) {
    if (!v.trace) continue;
    const std::string file = prefix + trace_file_name(v.query);
    const std::string text = read_file(expected / file);
    if (text != render_text(*v.trace)) throw CorpusCorrupt(file + " differs from the trace in the phase 2 golden");
    try {
      replay(*v.trace, model, attacker);
    } catch (const ReplayDivergence& e) {
      throw CorpusCorrupt(file + ": " + e.what());
    }
    g.traces[file] = text;
  }
  return g;
}

std::vector<CapabilityDelta> parse_overrides(const std::vector<std::string>& texts) {
  std::vector<CapabilityDelta> out;
  for (const std::string& t : texts) {
    try {
      out.push_back(parse_delta(t));
    } catch (const SpecError& e) {
      throw CorpusCorrupt("override '" + t + "': " + e.what());
    }
  }
  return out;
}

void compare(const std::string& what, const Json& expected, const Json& actual, std::vector<std::string>& out) {
  if (expected != actual) out.push_back(what + " differs from the golden");
}

void check(const std::string& what, const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides,
           const ConflictReport& phase1, const std::optional<VerificationResult>& phase2,
           std::vector<std::string>& out) {
  const ConflictReport actual1 = run_phase1(spec, overrides);
  compare(what + " phase 1", to_json(phase1), to_json(actual1), out);
  if (!phase2) {
    if (actual1.verdict == ConflictReport::Verdict::pass) out.push_back(what + ": phase 1 passes, phase 2 has no golden");
    return;
  }
  if (actual1.verdict != ConflictReport::Verdict::pass) out.push_back(what + ": phase 2 golden exists but phase 1 fails");
  SessionConfig config;
  config.sessions_per_role = phase2->config.sessions_per_role;
  config.attacker_fresh_budget = phase2->config.attacker_fresh_budget;
  compare(what + " phase 2", to_json(*phase2), to_json(run_phase2(spec, overrides, config)), out);
}

void write_all(const fs::path& dir, const std::string& prefix, const ProtocolSpec& spec,
               const std::vector<CapabilityDelta>& overrides, const SessionConfig& config = {}) {
  const fs::path expected = dir / "expected";
  fs::create_directories(expected);
  for (const auto& entry : fs::directory_iterator(expected)) {
    const std::string f = entry.path().filename().string();
    if (f.rfind(prefix + "trace-", 0) == 0)
      fs::remove(entry.path());
  }
  const ConflictReport p1 = run_phase1(spec, overrides);
  write_file(expected / (prefix + "phase1.json"), dump(to_json(p1)));
  if (p1.verdict != ConflictReport::Verdict::pass) {
    write_file(expected / (prefix + "phase2.json"), dump(Json{{"not_run", "phase 1 reports conflicts"}}));
    return;
  }
  const VerificationResult p2 = run_phase2(spec, overrides, config);
  write_file(expected / (prefix + "phase2.json"), dump(to_json(p2)));
  for (const QueryVerdict& v : p2.verdicts)
    if (v.trace) write_file(expected / (prefix + trace_file_name(v.query)), render_text(*v.trace));
}

}  // namespace

std::vector<std::string> case_names() { return {"mana3", "wep_ska", "chat_srp"}; }

fs::path default_cases_dir() {
  if (const char* env = std::getenv("PROTOSCOPE_CASES_DIR")) return env;
  return PROTOSCOPE_CASES_DIR;
}

std::string trace_file_name(const Query& q) {
  std::string slug;
  for (char c : describe(q)) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    if (keep)
      slug += c;
    else if (!slug.empty() && slug.back() != '-')
      slug += '-';
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return "trace-" + slug + ".txt";
}

ConflictReport run_phase1(const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides,
                          const std::vector<DefeatRule>& rules) {
  return check_conflicts(build_requirement_table(spec), with_overrides(spec, overrides), rules);
}

VerificationResult run_phase2(const ProtocolSpec& spec, const std::vector<CapabilityDelta>& overrides,
                              const SessionConfig& config) {
  const ProtocolModel model = compile(spec);
  return explore(model, with_overrides(spec, overrides), config, spec.queries);
}

CaseStudy load_case(const std::string& name, const fs::path& cases_dir) {
  const auto names = case_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown case study '" + name + "'");
  CaseStudy c;
  c.name = name;
  c.dir = cases_dir / name;
  c.spec_path = c.dir / "spec.proto-spec";
  c.spec = load_spec(c.spec_path);
  Goldens g = load_goldens(c.dir, "", c.spec, {});
  c.expected_phase1 = std::move(g.phase1);
  c.expected_phase2 = std::move(g.phase2);
  c.traces = std::move(g.traces);
  for (const VariantDecl& d : variant_decls(c.dir)) {
    CaseVariant v;
    v.name = d.name;
    v.spec_path = c.dir / d.spec;
    v.spec = load_spec(v.spec_path);
    v.overrides = parse_overrides(d.overrides);
    try {
      with_overrides(v.spec, v.overrides);
    } catch (const SpecError& e) {
      throw CorpusCorrupt(name + "/" + d.name + ": " + e.what());
    }
    Goldens vg = load_goldens(c.dir, d.name + "-", v.spec, v.overrides);
    v.expected_phase1 = std::move(vg.phase1);
    v.expected_phase2 = std::move(vg.phase2);
    for (auto& [f, t] : vg.traces) c.traces[f] = std::move(t);
    c.variants.push_back(std::move(v));
  }
  return c;
}

bool CorpusReport::passed() const {
  return std::all_of(studies.begin(), studies.end(), [](const StudyOutcome& s) { return s.passed; });
}

CorpusReport run_all(const fs::path& cases_dir) {
  CorpusReport report;
  for (const std::string& name : case_names()) {
    StudyOutcome o{name, false, {}};
    try {
      const CaseStudy c = load_case(name, cases_dir);
      check(name, c.spec, {}, c.expected_phase1, c.expected_phase2, o.mismatches);
      for (const CaseVariant& v : c.variants)
        check(name + "/" + v.name, v.spec, v.overrides, v.expected_phase1, v.expected_phase2, o.mismatches);
    } catch (const std::exception& e) {
      o.mismatches.push_back(e.what());
    }
    o.passed = o.mismatches.empty();
    report.studies.push_back(std::move(o));
  }
  return report;
}

void write_goldens(const std::string& name, const fs::path& cases_dir) {
  const fs::path dir = cases_dir / name;
  write_all(dir, "", load_spec(dir / "spec.proto-spec"), {});
  for (const VariantDecl& d : variant_decls(dir))
    write_all(dir, d.name + "-", load_spec(dir / d.spec), parse_overrides(d.overrides), d.config);
}

}  // namespace protoscope
