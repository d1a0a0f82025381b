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

// protoscope: phase-1 requirement checking and phase-2 bounded verification
// of protocol specs.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "protoscope/corpus.hpp"
#include "protoscope/diagram.hpp"
#include "protoscope/engine.hpp"
#include "protoscope/informal.hpp"
#include "protoscope/parser.hpp"
#include "protoscope/report.hpp"

namespace fs = std::filesystem;
using namespace protoscope;

namespace {

enum Exit { kOk = 0, kError = 1, kConflicts = 2, kViolation = 3, kBudget = 4 };

struct Options {
  std::string file;
  std::string format = "text";
  std::string rules;
  std::vector<std::string> capabilities;
  int sessions = 2;
  std::optional<std::size_t> depth;
  std::string trace_out;
  bool with_phase1 = false;
  std::string cases;
  bool write = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void diagnose(const std::string& file, const std::exception& e) {
  if (auto* s = dynamic_cast<const SpecError*>(&e); s && s->pos().line > 0)
    std::cerr << file << ":" << s->pos().line << ":" << s->pos().col << ": error: " << e.what() << "\n";
  else
    std::cerr << "protoscope: error: " << e.what() << "\n";
}

AttackerModel attacker_for(const ProtocolSpec& spec, const Options& o) {
  AttackerModel a = spec.attacker;
  for (const std::string& c : o.capabilities) apply_override(a, parse_delta(c));
  return a;
}

int phase1(const ProtocolSpec& spec, const Options& o, bool json_out) {
  std::vector<DefeatRule> rules = default_defeat_rules();
  if (!o.rules.empty()) rules = apply_rule_overrides(std::move(rules), Json::parse(slurp(o.rules)));
  const ConflictReport r = check_conflicts(build_requirement_table(spec), attacker_for(spec, o), rules);
  if (json_out)
    std::cout << to_json(r).dump(2) << "\n";
  else
    std::cout << render_text(r);
  return r.verdict == ConflictReport::Verdict::pass ? kOk : kConflicts;
}

int cmd_check(const Options& o) {
  const ProtocolSpec spec = parse_file(o.file);
  return phase1(spec, o, o.format == "json");
}

int cmd_verify(const Options& o) {
  const ProtocolSpec spec = parse_file(o.file);
  const bool json_out = o.format == "json";
  if (o.with_phase1) {
    const int p1 = phase1(spec, o, json_out);
    if (p1 != kOk) return p1;
  }
  SessionConfig config;
  config.sessions_per_role = o.sessions;
  config.depth_bound = o.depth;
  if (const char* env = std::getenv("PROTOSCOPE_STATE_CEILING")) config.state_ceiling = std::stoull(env);
  const AttackerModel attacker = attacker_for(spec, o);
  VerificationResult result;
  try {
    result = explore(compile(spec), attacker, config, spec.queries);
  } catch (const SearchBudgetExceeded& e) {
    const SearchStatistics& s = e.partial();
    std::cerr << "protoscope: " << e.what() << " (" << s.states << " states, " << s.transitions << " transitions, max closure "
              << s.max_closure << ", " << s.wall_ms << " ms)\n";
    return kBudget;
  }
  if (json_out)
    std::cout << to_json(result).dump(2) << "\n";
  else
    std::cout << render_text(result);
  bool violated = false;
  for (const QueryVerdict& v : result.verdicts) {
    if (!v.trace) continue;
    violated = true;
    if (o.trace_out.empty()) continue;
    fs::create_directories(o.trace_out);
    const fs::path txt = fs::path(o.trace_out) / trace_file_name(v.query);
    std::ofstream(txt, std::ios::binary) << render_text(*v.trace);
    fs::path js = txt;
    js.replace_extension(".json");
    std::ofstream(js, std::ios::binary) << to_json(*v.trace).dump(2) << "\n";
    if (!json_out) std::cout << "trace written to " << txt.string() << "\n";
  }
  return violated ? kViolation : kOk;
}

int cmd_render(const Options& o) {
  std::cout << render_tagged_diagram(parse_file(o.file));
  return kOk;
}

int cmd_corpus(const Options& o) {
  const fs::path dir = o.cases.empty() ? default_cases_dir() : fs::path(o.cases);
  if (o.write) {
    for (const std::string& n : case_names()) write_goldens(n, dir);
    std::cout << "goldens written under " << dir.string() << "\n";
    return kOk;
  }
  const CorpusReport r = run_all(dir);
  for (const StudyOutcome& s : r.studies) {
    std::cout << (s.passed ? "pass  " : "FAIL  ") << s.name << "\n";
    for (const std::string& m : s.mismatches) std::cout << "      " << m << "\n";
  }
  return r.passed() ? kOk : kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protocol design verification workbench"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "phase 1: requirement conflicts against the attacker capabilities");
  check->add_option("file", o.file, "protocol spec")->required();
  check->add_option("--rules", o.rules, "defeat-rule overrides (JSON)");
  check->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--capability", o.capabilities, "extra capability delta, e.g. -observe_keypad_input");

  auto* verify = app.add_subcommand("verify", "phase 2: bounded symbolic verification of the queries");
  verify->add_option("file", o.file, "protocol spec")->required();
  verify->add_option("--sessions", o.sessions, "sessions per role")->check(CLI::PositiveNumber);
  verify->add_option("--depth", o.depth, "term depth bound for attacker deductions");
  verify->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--trace-out", o.trace_out, "directory for attack traces");
  verify->add_flag("--with-phase1", o.with_phase1, "run phase 1 first and stop on conflicts");
  verify->add_option("--rules", o.rules, "defeat-rule overrides for --with-phase1 (JSON)");
  verify->add_option("--capability", o.capabilities, "extra capability delta");

  auto* render = app.add_subcommand("render", "print the requirement-tagged sequence diagram");
  render->add_option("file", o.file, "protocol spec")->required();

  auto* corpus = app.add_subcommand("corpus", "run the bundled case studies against their goldens");
  corpus->add_option("--cases", o.cases, "corpus directory");
  corpus->add_flag("--write", o.write, "regenerate the golden files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*check) return cmd_check(o);
    if (*verify) return cmd_verify(o);
    if (*render) return cmd_render(o);
    return cmd_corpus(o);
  } catch (const std::exception& e) {
    diagnose(o.file, e);
    return kError;
  }
}
