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

#include <random>

#include "protoscope/deduction.hpp"
#include "support/oracle.hpp"
#include "support/random_spec.hpp"

using namespace protoscope;

namespace {

const Term a = Term::atom("a", Sort::nonce);
const Term b = Term::atom("b", Sort::nonce);
const Term c = Term::atom("c", Sort::nonce);
const Term k = Term::atom("k", Sort::key);
const Term m1 = Term::atom("m1", Sort::data);
const Term m2 = Term::atom("m2", Sort::data);

KnowledgeSet kb_of(std::set<Term> base, std::size_t bound = 4) { return close(base, standard_rules(), bound); }

}  // namespace

TEST_CASE("keystream recovery from a known plaintext") {
  auto kb = kb_of({c, Term::xor_mask(c, k)});
  CHECK(kb.contains(k));
  auto d = kb.derivation(k);
  REQUIRE(d);
  CHECK(d->rule == "xor-recover-key");
  CHECK(replay_derivation(*d, kb.base(), kb.rules()));
}

TEST_CASE("keystream reuse masks a chosen plaintext") {
  auto kb = kb_of({Term::xor_mask(m1, k), m1, m2});
  CHECK(kb.contains(Term::xor_mask(m2, k)));
  auto d = kb.derivation(Term::xor_mask(m2, k));
  REQUIRE(d);
  CHECK(replay_derivation(*d, kb.base(), kb.rules()));
}

TEST_CASE("a MAC does not leak its key") {
  auto kb = kb_of({Term::mac(m1, k)});
  CHECK_FALSE(kb.contains(k));
  CHECK_FALSE(kb.contains(m1));
  CHECK_FALSE(derivable(kb, k).derivable);
}

TEST_CASE("pairs and encryptions are taken apart") {
  auto kb = kb_of({Term::senc(Term::pair(a, b), k), k});
  CHECK(kb.contains(a));
  CHECK(kb.contains(b));
  CHECK(kb.contains(Term::pair(b, a)));
  CHECK_FALSE(kb.contains(c));
  CHECK(kb.witnesses().at(Term::pair(a, b)).rule == "sdec");
}

TEST_CASE("ciphertext without the key stays opaque") {
  auto kb = kb_of({Term::senc(a, k)});
  CHECK_FALSE(kb.contains(a));
  CHECK(kb.contains(Term::hash(Term::senc(a, k))));
}

TEST_CASE("synthesis respects the depth bound") {
  auto kb = kb_of({a}, 2);
  CHECK(kb.contains(Term::pair(a, a)));
  CHECK_FALSE(kb.contains(Term::pair(a, Term::pair(a, a))));
  CHECK(kb_of({a}, 3).contains(Term::pair(a, Term::pair(a, a))));
}

TEST_CASE("extend equals closing the union") {
  auto small = kb_of({Term::senc(a, k)});
  const Term more[] = {k};
  auto grown = small.extend(more);
  auto direct = kb_of({Term::senc(a, k), k});
  CHECK(std::set<Term>(grown.analyzed().begin(), grown.analyzed().end()) ==
        std::set<Term>(direct.analyzed().begin(), direct.analyzed().end()));
  CHECK(grown.contains(a));
}

TEST_CASE("the closure ceiling is enforced") {
  std::set<Term> base;
  Term t = a;
  for (int i = 0; i < 6; ++i) t = Term::pair(t, Term::atom("x" + std::to_string(i), Sort::data));
  base.insert(t);
  CHECK_THROWS_AS(close(base, standard_rules(), 10, 3), ClosureBudgetExceeded);
}

TEST_CASE("rules reject unbound conclusion variables") {
  CHECK_THROWS_AS(DeductionRule("bad", {Term::var("x")}, Term::var("y")), std::invalid_argument);
}

TEST_CASE("derivations replay against the rules") {
  auto kb = kb_of({Term::pair(a, Term::senc(b, k)), k});
  auto d = kb.derivation(Term::mac(b, a));
  REQUIRE(d);
  CHECK(d->rule == "mac-construct");
  CHECK(replay_derivation(*d, kb.base(), kb.rules()));
  Derivation forged{k, "unpair-left", {Derivation{a, "", {}}}};
  CHECK_FALSE(replay_derivation(forged, kb.base(), kb.rules()));
}

TEST_CASE("closure agrees with brute-force enumeration on random bases") {
  std::mt19937 rng(2024);
  const auto rules = standard_rules();
  for (int round = 0; round < 100; ++round) {
    std::set<Term> base;
    const int n = 1 + gen::pick(rng, 6);
    while (static_cast<int>(base.size()) < n) base.insert(gen::random_term(rng, 3));
    std::vector<Term> goals;
    for (int g = 0; g < 20; ++g) goals.push_back(gen::random_term(rng, 3));
    auto kb = close(base, rules, 4);
    oracle::BruteClosure brute(base, goals, rules, 4);
    for (const Term& g : goals) {
      INFO(g.str());
      CHECK(kb.contains(g) == brute.derives(g));
    }
  }
}
