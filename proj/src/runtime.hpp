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

// Execution helpers shared by the search and the trace replayer.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protoscope/engine.hpp"

namespace protoscope::detail {

struct Instance {
  std::size_t process = 0;
  int session = 1;
  std::size_t pc = 0;
  bool aborted = false;
  std::map<std::string, Term> env;
};

class Runtime {
 public:
  Runtime(const ProtocolModel& model, const AttackerModel& attacker);

  const ProtocolModel& model() const { return model_; }
  const RoleProcess& process(const Instance& i) const { return model_.processes[i.process]; }
  std::string label(const Instance& i) const;
  /// Next action of `i`, or null when the process is finished or aborted.
  const Action* current(const Instance& i) const;

  /// Value of `expr` under the instance bindings; nullopt if some symbol is
  /// still unbound.
  std::optional<Term> eval(const Term& expr, const Instance& i) const;
  bool match(const Pattern& p, const Term& value, Instance& i) const;

  /// Executes fresh/compute/check actions until a send, receive, begin or
  /// end action (or the end of the process). Returns false if a check failed,
  /// in which case the instance is aborted.
  bool run_local(Instance& i) const;

  /// Instance value of a per-session symbol.
  Term fresh_value(const std::string& symbol, const Instance& i) const;

  /// Whether the attacker reads `element` when sent over `channel`.
  bool observable(ChannelClass channel, const std::string& element) const;
  /// Whether the attacker may inject a message carrying `elements`.
  bool injectable(ChannelClass channel, const std::vector<std::string>& elements) const;

  /// Initial attacker knowledge for `fresh_budget` attacker-generated atoms.
  std::vector<Term> initial_knowledge(int fresh_budget) const;
  static Term attacker_atom(int n);

  /// Concrete values the query target denotes in `instances`.
  std::vector<Term> secrecy_values(const SecrecyQuery& q, const std::vector<Instance>& instances) const;

  /// Splits a right-nested tuple into `n` parts; nullopt if the shape differs.
  static std::optional<std::vector<Term>> split(const Term& message, std::size_t n);

 private:
  const ProtocolModel& model_;
  const AttackerModel& attacker_;
};

}  // namespace protoscope::detail
