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


#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "protoscope/corpus.hpp"

using namespace protoscope;
namespace fs = std::filesystem;

namespace {

fs::path scratch_copy(const std::string& tag) {
  const fs::path dst = fs::temp_directory_path() / ("protoscope-corpus-" + tag);
  fs::remove_all(dst);
  fs::copy(default_cases_dir(), dst, fs::copy_options::recursive);
  return dst;
}

}  // namespace

TEST_CASE("every bundled study loads") {
  for (const std::string& name : case_names()) {
    INFO(name);
    const CaseStudy c = load_case(name);
    CHECK(c.name == name);
    CHECK_FALSE(c.spec.steps.empty());
  }
  CHECK_THROWS_AS(load_case("nope"), std::invalid_argument);
}

TEST_CASE("the bundled corpus matches its goldens") {
  const CorpusReport r = run_all();
  for (const StudyOutcome& s : r.studies) {
    INFO(s.name);
    for (const std::string& m : s.mismatches) UNSCOPED_INFO(m);
    CHECK(s.passed);
  }
  CHECK(r.passed());
}

TEST_CASE("violated goldens ship a replayable text trace") {
  const CaseStudy c = load_case("wep_ska");
  CHECK(c.traces.count("trace-secrecy-k.txt"));
  CHECK(c.traces.count("trace-auth-WD-AP-on-resp.txt"));
  CHECK(trace_file_name(AuthQuery{"WD", "AP", "resp"}) == "trace-auth-WD-AP-on-resp.txt");
}

TEST_CASE("a tampered trace file is detected") {
  const fs::path dir = scratch_copy("tamper");
  std::ofstream(dir / "wep_ska" / "expected" / "trace-secrecy-k.txt", std::ios::app) << "HonestSend X.1\n";
  CHECK_THROWS_AS(load_case("wep_ska", dir), CorpusCorrupt);
  fs::remove_all(dir);
}

TEST_CASE("a changed golden is reported as a mismatch") {
  const fs::path dir = scratch_copy("golden");
  std::ofstream(dir / "chat_srp" / "expected" / "phase1.json")
      << R"({"verdict": "fail", "conflicts": []})" << "\n";
  const CorpusReport r = run_all(dir);
  CHECK_FALSE(r.passed());
  write_goldens("chat_srp", dir);
  CHECK(run_all(dir).passed());
  fs::remove_all(dir);
}
