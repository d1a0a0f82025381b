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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PROTOSCOPE_CLI_PATH;
const std::string kCases = PROTOSCOPE_CASES_DIR;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = fs::temp_directory_path() / "protoscope-cli-test.out";
  const std::string cmd = env + " " + kCli + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string spec(const std::string& name, const std::string& file = "spec.proto-spec") {
  return kCases + "/" + name + "/" + file;
}

}  // namespace

TEST_CASE("check exits 2 on conflicts and 0 otherwise") {
  const Run conflict = run("check " + spec("mana3"));
  CHECK(conflict.code == 2);
  CHECK(conflict.out.find("observe_keypad_input") != std::string::npos);
  CHECK(run("check " + spec("mana3") + " --capability=-observe_keypad_input").code == 0);
  CHECK(run("check " + spec("chat_srp")).code == 0);
  const Run json = run("check --format json " + spec("mana3"));
  CHECK(json.out.find("\"verdict\": \"fail\"") != std::string::npos);
}

TEST_CASE("verify exits 3 on a violation and writes traces") {
  const fs::path dir = fs::temp_directory_path() / "protoscope-cli-traces";
  fs::remove_all(dir);
  const Run r = run("verify --trace-out " + dir.string() + " " + spec("wep_ska"));
  CHECK(r.code == 3);
  CHECK(fs::exists(dir / "trace-secrecy-k.txt"));
  CHECK(fs::exists(dir / "trace-secrecy-k.json"));
  CHECK(fs::exists(dir / "trace-auth-WD-AP-on-resp.txt"));
  fs::remove_all(dir);
  CHECK(run("verify " + spec("wep_ska", "fresh-iv.proto-spec")).code == 0);
}

TEST_CASE("verify can stop after phase 1") {
  CHECK(run("verify --with-phase1 " + spec("mana3")).code == 2);
}

TEST_CASE("verify exits 4 when the state ceiling is hit") {
  CHECK(run("verify " + spec("chat_srp"), "PROTOSCOPE_STATE_CEILING=20").code == 4);
}

TEST_CASE("usage and input errors exit 1") {
  CHECK(run("check /nonexistent.proto-spec").code == 1);
  CHECK(run("frobnicate").code == 1);
  const fs::path bad = fs::temp_directory_path() / "protoscope-bad.proto-spec";
  std::ofstream(bad) << "protocol x\nstep 1 A -> B over pigeon: m\n";
  const Run r = run("check " + bad.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("protoscope-bad.proto-spec:2:") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("render prints the tagged diagram") {
  const Run r = run("render " + spec("wep_ska"));
  CHECK(r.code == 0);
  CHECK(r.out.find("protocol wep_ska") != std::string::npos);
}

TEST_CASE("corpus passes on the bundled cases") {
  const Run r = run("corpus");
  CHECK(r.code == 0);
  CHECK(r.out.find("pass  wep_ska") != std::string::npos);
}
