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

#include <set>

#include "protoscope/term.hpp"

using namespace protoscope;

namespace {
const Term a = Term::atom("a", Sort::nonce);
const Term b = Term::atom("b", Sort::nonce);
const Term k = Term::atom("k", Sort::key);
}  // namespace

TEST_CASE("terms compare structurally") {
  CHECK(Term::pair(a, b) == Term::pair(Term::atom("a", Sort::nonce), b));
  CHECK(Term::pair(a, b) != Term::pair(b, a));
  CHECK(Term::atom("a", Sort::nonce) != Term::atom("a", Sort::key));
  CHECK(Term::senc(a, k) != Term::mac(a, k));
  CHECK(Term::pair(a, b).hash_value() == Term::pair(a, b).hash_value());
}

TEST_CASE("term order puts smaller terms first") {
  CHECK(a < Term::pair(a, b));
  CHECK(Term::hash(a) < Term::pair(a, b));
  std::set<Term> s{Term::pair(a, b), a, b, Term::hash(a)};
  CHECK(s.begin()->is_atom());
}

TEST_CASE("depth, size and groundness") {
  const Term t = Term::senc(Term::pair(a, b), k);
  CHECK(a.depth() == 1);
  CHECK(t.depth() == 3);
  CHECK(t.size() == 5);
  CHECK(t.ground());
  CHECK_FALSE(Term::pair(a, Term::var("x")).ground());
}

TEST_CASE("rendering uses the constructor names") {
  CHECK(Term::pair(a, b).str() == "pair(a,b)");
  CHECK(Term::xor_mask(a, k).str() == "xor(a,k)");
  CHECK(Term::hash(Term::mac(a, k)).str() == "hash(mac(a,k))");
  CHECK(to_string(TermKind::xor_mask) == "xor");
}

TEST_CASE("tuples nest to the right") {
  CHECK(Term::tuple({a}) == a);
  CHECK(Term::tuple({a, b, k}) == Term::pair(a, Term::pair(b, k)));
}

TEST_CASE("atoms_of keeps first occurrences in order") {
  auto atoms = atoms_of(Term::pair(b, Term::senc(a, b)));
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0] == b);
  CHECK(atoms[1] == a);
}

TEST_CASE("sorts round-trip through their names") {
  for (Sort s : {Sort::agent, Sort::nonce, Sort::key, Sort::data, Sort::constant})
    CHECK(parse_sort(to_string(s)) == s);
  CHECK_FALSE(parse_sort("bogus"));
}
