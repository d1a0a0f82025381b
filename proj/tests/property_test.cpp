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

#include "support/properties.hpp"

TEST_CASE("random specs satisfy the closure, delta, replay and determinism properties") {
  const props::Tally t = props::run_suite(220, 99);
  for (const std::string& f : t.failures) UNSCOPED_INFO(f);
  CHECK(t.failures.empty());
  CHECK(t.specs >= 200);
  CHECK(t.traces > 0);
  CHECK(t.deltas > 0);
}

TEST_CASE("generated specs are reproducible from the seed") {
  std::mt19937 r1(5), r2(5);
  for (int i = 0; i < 20; ++i) CHECK(gen::random_spec(r1, i).source == gen::random_spec(r2, i).source);
}
