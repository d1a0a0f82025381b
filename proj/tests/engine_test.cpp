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

#include <algorithm>

#include "protoscope/corpus.hpp"
#include "protoscope/engine.hpp"
#include "protoscope/parser.hpp"

using namespace protoscope;

namespace {

const RoleProcess& process(const ProtocolModel& m, const std::string& who) {
  auto it = std::find_if(m.processes.begin(), m.processes.end(),
                         [&](const RoleProcess& p) { return p.principal == who; });
  REQUIRE(it != m.processes.end());
  return *it;
}

std::ptrdiff_t index_of(const RoleProcess& p, Action::Kind kind, int step = -1) {
  for (std::size_t i = 0; i < p.actions.size(); ++i)
    if (p.actions[i].kind == kind && (step < 0 || p.actions[i].step.major == step)) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

bool is_inject(const TraceEvent& e) { return std::holds_alternative<AttackerInject>(e); }

}  // namespace

TEST_CASE("the challenge-response case compiles to two processes") {
  const ProtocolModel m = compile(load_case("wep_ska").spec);
  REQUIRE(m.processes.size() == 2);
  const RoleProcess& ap = process(m, "AP");
  const RoleProcess& wd = process(m, "WD");
  CHECK(index_of(ap, Action::Kind::check_equal) >= 0);
  CHECK(index_of(ap, Action::Kind::end) > index_of(ap, Action::Kind::check_equal));
  CHECK(index_of(wd, Action::Kind::begin) >= 0);
  CHECK(index_of(wd, Action::Kind::begin) < index_of(wd, Action::Kind::send, 5));
  CHECK(m.default_depth_bound == 2 + load_case("wep_ska").spec.max_term_depth());
}

TEST_CASE("a compute-only spec compiles to a single process") {
  const ProtocolModel m = compile(parse("protocol c\nprincipal A knows k:key\nstep 1 fresh n compute A: h=hash(n)\n"));
  REQUIRE(m.processes.size() == 1);
  CHECK(m.processes[0].actions.size() == 2);
  CHECK(m.processes[0].actions[0].kind == Action::Kind::fresh);
  CHECK(m.processes[0].actions[1].kind == Action::Kind::compute);
}

TEST_CASE("the registration case compiles to four processes") {
  const ProtocolModel m = compile(load_case("chat_srp").spec);
  CHECK(m.processes.size() == 4);
  CHECK(index_of(process(m, "RA"), Action::Kind::end) > index_of(process(m, "RA"), Action::Kind::check_equal, 13));
}

TEST_CASE("receivers decrypt under keys they hold") {
  const ProtocolModel m = compile(parse("protocol p\nprincipal A knows k:key\nprincipal B knows k:key\n"
                                        "step 1 fresh n A -> B over insecure: c=senc(n, k)\n"));
  const RoleProcess& b = process(m, "B");
  REQUIRE(b.actions.size() == 1);
  REQUIRE(b.actions[0].patterns.size() == 1);
  CHECK(b.actions[0].patterns[0].kind == Pattern::Kind::decrypt);
  CHECK(b.actions[0].patterns[0].alias == "c");
}

TEST_CASE("an authentication query without an acceptance point is rejected") {
  const ProtocolSpec s = parse("protocol p\nprincipal A knows k:key\nprincipal B knows k:key\n"
                               "step 1 fresh n A -> B over insecure: c=senc(n, k)\nquery auth B A on c\n");
  CHECK_THROWS_AS(compile(s), CompileError);
}

TEST_CASE("keystream reuse breaks the challenge-response case") {
  const CaseStudy c = load_case("wep_ska");
  const ProtocolModel m = compile(c.spec);
  const VerificationResult r = explore(m, c.spec.attacker, SessionConfig{}, c.spec.queries);
  REQUIRE(r.verdicts.size() == 2);
  for (const QueryVerdict& v : r.verdicts) {
    REQUIRE_FALSE(v.holds());
    CHECK(replay(*v.trace, m, c.spec.attacker));
  }
  const AttackTrace& auth = *r.verdicts[1].trace;
  auto first_inject = std::find_if(auth.events.begin(), auth.events.end(), is_inject);
  REQUIRE(first_inject != auth.events.end());
  CHECK(std::none_of(first_inject + 1, auth.events.end(), is_inject));
  const auto* last = std::get_if<EndEvent>(&auth.events.back());
  REQUIRE(last);
  CHECK(last->session.rfind("AP.", 0) == 0);
  CHECK(last->args.back().kind() == TermKind::xor_mask);
  const Derivation& d = *r.verdicts[0].trace->derivation;
  CHECK(d.rule == "xor-recover-key");
}

TEST_CASE("a fresh per-response key restores both properties") {
  const CaseStudy c = load_case("wep_ska");
  const CaseVariant& v = c.variants.at(0);
  const VerificationResult r = explore(compile(v.spec), v.spec.attacker, SessionConfig{}, v.spec.queries);
  for (const QueryVerdict& q : r.verdicts) CHECK(q.holds());
  CHECK(r.stats.states > 0);
}

TEST_CASE("honest runs alone never violate") {
  AttackerModel passive;
  apply_override(passive, parse_delta("-inject_messages"));
  const CaseStudy c = load_case("chat_srp");
  SessionConfig cfg;
  cfg.sessions_per_role = 1;
  const VerificationResult r = explore(compile(c.spec), passive, cfg, c.spec.queries);
  for (const QueryVerdict& q : r.verdicts) CHECK(q.holds());
}

TEST_CASE("the state ceiling stops the search") {
  const CaseStudy c = load_case("chat_srp");
  SessionConfig cfg;
  cfg.state_ceiling = 50;
  try {
    explore(compile(c.spec), c.spec.attacker, cfg, c.spec.queries);
    FAIL("expected the ceiling to trip");
  } catch (const SearchBudgetExceeded& e) {
    CHECK(e.partial().states > 50);
  }
}

TEST_CASE("replay rejects traces that do not reproduce a violation") {
  const CaseStudy c = load_case("wep_ska");
  const ProtocolModel m = compile(c.spec);
  const VerificationResult r = explore(m, c.spec.attacker, SessionConfig{}, c.spec.queries);
  const AttackTrace good = *r.verdicts[1].trace;

  AttackTrace empty = good;
  empty.events.clear();
  try {
    replay(empty, m, c.spec.attacker);
    FAIL("empty trace replayed");
  } catch (const ReplayDivergence& e) {
    CHECK(e.index() == 0);
  }

  AttackTrace forged = good;
  auto inject = std::find_if(forged.events.begin(), forged.events.end(), is_inject);
  const std::size_t at = static_cast<std::size_t>(inject - forged.events.begin());
  const Term secret = Term::atom("unknown-secret", Sort::nonce);
  const Term orig = std::get<AttackerInject>(*inject).term;
  const Term swapped = Term::pair(orig.arg(0), Term::pair(orig.arg(1).arg(0), Term::pair(orig.arg(1).arg(1).arg(0), secret)));
  std::get<AttackerInject>(*inject).term = swapped;
  std::get<HonestReceive>(*(inject + 1)).term = swapped;
  try {
    replay(forged, m, c.spec.attacker);
    FAIL("underivable injection replayed");
  } catch (const ReplayDivergence& e) {
    CHECK(e.index() == at);
  }

  AttackTrace cut = good;
  cut.events.pop_back();
  try {
    replay(cut, m, c.spec.attacker);
    FAIL("truncated trace replayed");
  } catch (const ReplayDivergence& e) {
    CHECK(e.index() == cut.events.size());
  }
}
