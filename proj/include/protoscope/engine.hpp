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

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "protoscope/deduction.hpp"
#include "protoscope/protocol.hpp"

namespace protoscope {

/// How a receiver takes an incoming value apart.
struct Pattern {
  enum class Kind {
    bind,     // unknown value: bind `symbol`; `shape` describes the expected form
    known,    // must equal the evaluation of `expr`
    pair,     // parts[0], parts[1]
    decrypt,  // senc/xor under the evaluable key `expr`; parts[0] matches the payload
  };
  Kind kind = Kind::known;
  std::string symbol;
  Term expr = Term::atom("_", Sort::data);
  Term shape = Term::atom("_", Sort::data);
  TermKind cipher = TermKind::senc;
  std::vector<Pattern> parts;
  /// Element name bound to the whole matched value, if any.
  std::string alias;
};

struct Action {
  enum class Kind { fresh, compute, check_equal, send, receive, begin, end };
  Kind kind = Kind::compute;
  StepId step;
  std::optional<ChannelClass> channel;
  /// send: receiver principal; receive: sender principal.
  std::string peer;
  /// fresh/compute/check_equal: the symbol involved.
  std::string symbol;
  /// compute/check_equal: the expression.
  Term expr = Term::atom("_", Sort::data);
  /// send/receive: element names in order.
  std::vector<std::string> elements;
  /// send: element expressions in order.
  std::vector<Term> parts;
  /// receive: one pattern per element.
  std::vector<Pattern> patterns;
  /// begin/end: event label and argument expressions.
  std::string label;
  std::vector<Term> args;
};

std::string describe(const Action& a);

/// One principal's program, obtained from the steps it takes part in.
struct RoleProcess {
  std::string principal;
  std::vector<Action> actions;
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiled protocol: role processes plus the symbol information the search
/// needs to name per-session values.
struct ProtocolModel {
  std::string name;
  std::vector<RoleProcess> processes;
  std::map<std::string, Symbol> symbols;
  std::vector<Term> public_terms;
  std::vector<std::string> principals;
  std::vector<Query> queries;
  std::size_t default_depth_bound = 3;
};

/// Builds one process per principal. Authentication queries add a begin
/// event before the claimant's send of the element and an end event at the
/// peer's acceptance point (after its last check on the element); uniqueness
/// queries add an end event at the final acceptance of the element.
ProtocolModel compile(const ProtocolSpec& spec);

/// Event label used for an authentication query.
std::string auth_label(const AuthQuery& q);
std::string unique_label(const UniqueQuery& q);

struct SessionConfig {
  int sessions_per_role = 2;
  int attacker_fresh_budget = 2;
  /// Defaults to 2 + the deepest term in the spec.
  std::optional<std::size_t> depth_bound;
  std::size_t state_ceiling = 1'000'000;
  std::size_t closure_ceiling = kDefaultClosureCeiling;
};

struct HonestSend {
  std::string session;
  StepId step;
  ChannelClass channel;
  Term term;
};
struct HonestReceive {
  std::string session;
  StepId step;
  Term term;
};
struct AttackerLearn {
  Term term;
  std::string rule;
};
struct AttackerInject {
  ChannelClass channel;
  Term term;
};
struct BeginEvent {
  std::string session;
  std::string label;
  std::vector<Term> args;
};
struct EndEvent {
  std::string session;
  std::string label;
  std::vector<Term> args;
};
using TraceEvent = std::variant<HonestSend, HonestReceive, AttackerLearn, AttackerInject, BeginEvent, EndEvent>;

struct AttackTrace {
  std::vector<TraceEvent> events;
  Query violated;
  int sessions_per_role = 1;
  int attacker_fresh_budget = 0;
  /// Secrecy: how the attacker derives the target.
  std::optional<Derivation> derivation;
  /// Human-readable counterexample summary.
  std::string witness;
};

struct QueryVerdict {
  Query query;
  /// Empty when the query holds within the explored bounds.
  std::optional<AttackTrace> trace;
  bool holds() const { return !trace.has_value(); }
};

struct SearchStatistics {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t max_closure = 0;
  double wall_ms = 0;
};

struct VerificationResult {
  std::vector<QueryVerdict> verdicts;
  SearchStatistics stats;
  SessionConfig config;
  /// Every term the attacker observed in any explored state.
  std::set<Term> observed;
};

class SearchBudgetExceeded : public std::runtime_error {
 public:
  SearchBudgetExceeded(std::size_t ceiling, SearchStatistics partial);
  const SearchStatistics& partial() const { return partial_; }

 private:
  SearchStatistics partial_;
};

/// Exhaustive breadth-first search over interleavings of
/// `config.sessions_per_role` sessions of every role against the attacker.
VerificationResult explore(const ProtocolModel& model, const AttackerModel& attacker, const SessionConfig& config,
                           const std::vector<Query>& queries);

class ReplayDivergence : public std::runtime_error {
 public:
  explicit ReplayDivergence(std::size_t index, const std::string& why);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Re-executes `trace` against the processes and returns true when it
/// reproduces the violation. Throws ReplayDivergence at the first event that
/// is not enabled, or at index events.size() if the violation is not reached.
bool replay(const AttackTrace& trace, const ProtocolModel& model, const AttackerModel& attacker,
            std::optional<std::size_t> depth_bound = std::nullopt);

}  // namespace protoscope
