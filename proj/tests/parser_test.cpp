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

#include "protoscope/diagram.hpp"
#include "protoscope/parser.hpp"

using namespace protoscope;

namespace {

const char* kSample = R"(# sample
protocol sample
goal "A learns that B holds k"
principal A trusted knows k:key, idA:agent
principal B knows k:key
public hello
attacker dolev_yao
capability +observe_keypad_input
capability -eavesdrop_wireless on insecure
step 1 fresh na A -> B over insecure: hello, na
step 2 fresh nb compute B: m=senc(pair(na, nb, hello), k)
step 3 B -> A over out_of_band_keypad: m [entered_via_keypad]
require step 1 na: uniqueness, authenticity, uniqueness
require step 3 m: confidentiality
query secrecy nb
query auth B A on m
)";

template <class E>
E parse_error(const std::string& src) {
  try {
    parse(src);
  } catch (const E& e) {
    return e;
  }
  FAIL("expected an error for:\n" << src);
  throw;
}

std::string with(const std::string& line) {
  return "protocol p\nprincipal A knows k:key\nprincipal B\nattacker dolev_yao\n" + line + "\n";
}

}  // namespace

TEST_CASE("a full spec parses") {
  const ProtocolSpec s = parse(kSample);
  CHECK(s.name == "sample");
  REQUIRE(s.goals.size() == 1);
  REQUIRE(s.principals.size() == 2);
  CHECK(s.principals[0].trusted);
  CHECK_FALSE(s.principals[1].trusted);
  CHECK(s.principals[0].initial_knowledge.size() == 2);
  REQUIRE(s.steps.size() == 3);
  CHECK(s.steps[2].id.str() == "3");
  CHECK(s.steps[1].kind == StepKind::compute);
  CHECK_FALSE(s.steps[1].channel);
  CHECK(s.steps[2].channel == ChannelClass::out_of_band_keypad);
  CHECK(s.steps[2].elements[0].provenance == "entered_via_keypad");
  CHECK(s.attacker.deltas.size() == 2);
  CHECK(s.attacker.deltas[1].scope == "insecure");
  CHECK(s.queries.size() == 2);
}

TEST_CASE("n-ary pair is right nested") {
  const ProtocolSpec s = parse(kSample);
  const Term& m = s.steps[1].elements[0].expr;
  REQUIRE(m.kind() == TermKind::senc);
  CHECK(m.arg(0).kind() == TermKind::pair);
  CHECK(m.arg(0).arg(1).kind() == TermKind::pair);
}

TEST_CASE("symbols record sorts and owners") {
  const ProtocolSpec s = parse(kSample);
  CHECK(s.symbols.at("k").sort == Sort::key);
  CHECK(s.symbols.at("idA").sort == Sort::agent);
  CHECK(s.symbols.at("na").kind == Symbol::Kind::fresh_atom);
  CHECK(s.symbols.at("na").owner == "A");
  CHECK(s.symbols.at("m").kind == Symbol::Kind::element);
  CHECK(s.symbols.at("m").owner == "B");
  CHECK(s.symbols.at("m").definition.has_value());
}

TEST_CASE("duplicate requirement properties are dropped") {
  const ProtocolSpec s = parse(kSample);
  REQUIRE(s.steps[0].requirements.size() == 1);
  CHECK(s.steps[0].requirements[0].properties ==
        std::vector<TrustProperty>{TrustProperty::uniqueness, TrustProperty::authenticity});
}

TEST_CASE("syntax errors carry a position") {
  auto e = parse_error<SyntaxError>(with("step 1 A -> B over pigeon: x"));
  CHECK(e.pos().line == 5);
  CHECK(e.expected().find("insecure") != std::string::npos);
  parse_error<SyntaxError>("principal A\n");
  parse_error<SyntaxError>(with("step 1 A -> B over insecure: m=frob(k)"));
  parse_error<SyntaxError>(with("frobnicate"));
}

TEST_CASE("unknown capabilities are rejected") {
  auto e = parse_error<UnknownCapability>(with("capability +teleport"));
  CHECK(e.name() == "teleport");
}

TEST_CASE("dangling references are rejected") {
  CHECK(parse_error<DanglingReference>(with("step 1 A -> C over insecure: k")).reference() == "C");
  parse_error<DanglingReference>(with("step 1 A -> B over insecure: k\nrequire step 3 k: authenticity"));
  parse_error<DanglingReference>(with("step 1 A -> B over insecure: k\nrequire step 1 q: authenticity"));
  parse_error<DanglingReference>(with("step 1 A -> B over insecure: k\nquery auth A B on q"));
}

TEST_CASE("values must be known before they are sent") {
  auto e = parse_error<CausalityError>(with("step 1 B -> A over insecure: m=senc(x, k)"));
  CHECK(e.step().str() == "1");
  CHECK(e.element() == "m");
}

TEST_CASE("redundant capability deltas are invalid") {
  parse_error<InvalidSpec>(with("capability +inject_messages"));
  parse_error<InvalidSpec>(with("capability -observe_keypad_input"));
}

TEST_CASE("runtime deltas parse and apply") {
  AttackerModel m;
  const CapabilityDelta d = parse_delta("-inject_messages");
  CHECK(d.sign == CapabilityDelta::Sign::minus);
  apply_override(m, d);
  CHECK_FALSE(m.grants(Capability::inject_messages));
  CHECK_THROWS_AS(apply_override(m, d), InvalidSpec);
  apply_override(m, parse_delta("+know_public_directory(a, b)"));
  CHECK(m.directory() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("scoped deltas only affect their scope") {
  const ProtocolSpec s = parse(kSample);
  auto on_insecure = s.attacker.effective_for(ChannelClass::insecure, "na");
  auto on_auth = s.attacker.effective_for(ChannelClass::authenticated, "na");
  auto has = [](const std::vector<EffectiveCapability>& v, Capability c) {
    return std::any_of(v.begin(), v.end(), [&](const EffectiveCapability& e) { return e.capability == c; });
  };
  CHECK_FALSE(has(on_insecure, Capability::eavesdrop_wireless));
  CHECK(has(on_insecure, Capability::eavesdrop_wired));
}

TEST_CASE("the tagged diagram lists every step with its tags") {
  const std::string d = render_tagged_diagram(parse(kSample));
  CHECK(d.find("protocol sample\n") == 0);
  CHECK(d.find("A(trusted) B") != std::string::npos);
  CHECK(d.find("1    [fresh na] A -> B over insecure: hello, na  {na: uniqueness, authenticity}") != std::string::npos);
  CHECK(d.find("B computes: m=senc(pair(na,pair(nb,hello)),k)") != std::string::npos);
  CHECK(d.find("m [entered_via_keypad]  {m: confidentiality}") != std::string::npos);
}

TEST_CASE("sub-steps print with a dot and must be dense") {
  const ProtocolSpec s = parse(with("step 1.1 A -> B over insecure: k\nstep 1.2 B -> A over insecure: k"));
  CHECK(s.steps[1].id.str() == "1.2");
  CHECK(s.steps[0].id < s.steps[1].id);
  parse_error<InvalidSpec>(with("step 1 A -> B over insecure: k\nstep 3 B -> A over insecure: k"));
}
