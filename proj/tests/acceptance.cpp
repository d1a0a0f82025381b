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


// Acceptance runner: one line per criterion, exit status 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "protoscope/corpus.hpp"
#include "protoscope/engine.hpp"
#include "protoscope/parser.hpp"
#include "support/oracle.hpp"
#include "support/properties.hpp"
#include "support/random_spec.hpp"

using namespace protoscope;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

bool is_inject(const TraceEvent& e) { return std::holds_alternative<AttackerInject>(e); }

bool all_hold(const VerificationResult& r) {
  return std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const QueryVerdict& v) { return v.holds(); });
}

Outcome pairing_conflict() {
  const auto t0 = Clock::now();
  const ProtocolSpec s = load_case("mana3").spec;
  const ConflictReport r = run_phase1(s);
  const double took = seconds_since(t0);
  const bool shape = r.conflicts.size() == 1 && r.verdict == ConflictReport::Verdict::fail &&
                     r.conflicts[0].step.str() == "2" && r.conflicts[0].element == "R" &&
                     r.conflicts[0].property == TrustProperty::confidentiality &&
                     r.conflicts[0].capability == Capability::observe_keypad_input;
  return {shape && took < 1.0, std::to_string(r.conflicts.size()) + " conflict(s) in " + fmt(took)};
}

Outcome pairing_counterfactual() {
  const ConflictReport r = run_phase1(load_case("mana3").spec, {parse_delta("-observe_keypad_input")});
  return {r.verdict == ConflictReport::Verdict::pass && r.conflicts.empty(),
          std::to_string(r.conflicts.size()) + " conflict(s)"};
}

Outcome keystream_attack() {
  const auto t0 = Clock::now();
  const ProtocolSpec s = load_case("wep_ska").spec;
  const ProtocolModel m = compile(s);
  const VerificationResult r = explore(m, s.attacker, SessionConfig{}, s.queries);
  const double took = seconds_since(t0);
  bool ok = took < 30.0 && r.stats.states < 1'000'000 && r.verdicts.size() == 2;
  for (const QueryVerdict& v : r.verdicts) {
    if (!v.trace) {
      ok = false;
      continue;
    }
    try {
      ok = ok && replay(*v.trace, m, s.attacker);
    } catch (const ReplayDivergence&) {
      ok = false;
    }
  }
  if (ok) {
    const auto& ev = r.verdicts[1].trace->events;
    auto first = std::find_if(ev.begin(), ev.end(), is_inject);
    ok = first != ev.end() && std::none_of(first + 1, ev.end(), is_inject);
    for (auto it = ev.begin(); ok && it != first; ++it)
      ok = std::holds_alternative<HonestSend>(*it) || std::holds_alternative<HonestReceive>(*it) ||
           std::holds_alternative<AttackerLearn>(*it) || std::holds_alternative<BeginEvent>(*it);
    const auto* end = std::get_if<EndEvent>(&ev.back());
    ok = ok && end && end->session.rfind("AP.", 0) == 0 && end->args.back().kind() == TermKind::xor_mask &&
         std::get<AttackerInject>(*first).term.kind() == TermKind::pair;
    if (ok) {
      const Term& injected = std::get<AttackerInject>(*first).term;
      ok = injected.arg(1).arg(1).arg(1) == end->args.back();
    }
  }
  return {ok, std::to_string(r.stats.states) + " states in " + fmt(took)};
}

Outcome keystream_fixed() {
  const auto t0 = Clock::now();
  const CaseVariant v = load_case("wep_ska").variants.at(0);
  const VerificationResult r = explore(compile(v.spec), v.spec.attacker, SessionConfig{}, v.spec.queries);
  const double took = seconds_since(t0);
  return {all_hold(r) && r.verdicts.size() == 2 && took < 60.0,
          std::to_string(r.stats.states) + " states in " + fmt(took)};
}

Outcome registration() {
  const auto t0 = Clock::now();
  const ProtocolSpec s = load_case("chat_srp").spec;
  const ConflictReport p1 = run_phase1(s);
  const VerificationResult r = explore(compile(s), s.attacker, SessionConfig{}, s.queries);
  const double took = seconds_since(t0);
  std::set<std::string> held;
  for (const QueryVerdict& v : r.verdicts)
    if (v.holds()) held.insert(describe(v.query));
  const std::set<std::string> want{"secrecy ticket", "secrecy ID", "auth User WS on ticket", "unique ticket"};
  return {p1.conflicts.empty() && held == want && took < 120.0,
          std::to_string(p1.conflicts.size()) + " conflict(s), " + std::to_string(held.size()) + "/4 hold, " +
              std::to_string(r.stats.states) + " states in " + fmt(took)};
}

Outcome deduction_oracle() {
  const auto t0 = Clock::now();
  std::mt19937 rng(20260101);
  const auto rules = standard_rules();
  int agree = 0, total = 0;
  for (int b = 0; b < 500; ++b) {
    std::set<Term> base;
    const int n = 1 + gen::pick(rng, 6);
    while (static_cast<int>(base.size()) < n) base.insert(gen::random_term(rng, 3));
    std::set<Term> sub;
    for (const Term& t : base) oracle::all_subterms(t, sub);
    const std::vector<Term> pieces(sub.begin(), sub.end());
    auto piece = [&] { return pieces[gen::pick(rng, static_cast<int>(pieces.size()))]; };
    std::vector<Term> goals;
    while (goals.size() < 20) {
      switch (gen::pick(rng, 4)) {
        case 0: goals.push_back(gen::random_term(rng, 3)); break;
        case 1: goals.push_back(piece()); break;
        case 2: goals.push_back(Term::pair(piece(), piece())); break;
        default: goals.push_back(Term::xor_mask(piece(), piece())); break;
      }
    }
    const KnowledgeSet kb = close(base, rules, 4);
    const oracle::BruteClosure brute(base, goals, rules, 4);
    for (const Term& g : goals) {
      ++total;
      if (kb.contains(g) == brute.derives(g)) ++agree;
    }
  }
  const double took = seconds_since(t0);
  return {agree == total && total == 10'000 && took < 60.0,
          std::to_string(agree) + "/" + std::to_string(total) + " agree in " + fmt(took)};
}

Outcome xor_rules() {
  const Term c = Term::atom("c", Sort::nonce), k = Term::atom("k", Sort::key);
  const Term m = Term::atom("m", Sort::data), m1 = Term::atom("m1", Sort::data), m2 = Term::atom("m2", Sort::data);
  const auto rules = standard_rules();
  const bool recover = close({c, Term::xor_mask(c, k)}, rules, 3).contains(k);
  const bool reuse = close({Term::xor_mask(m1, k), m1, m2}, rules, 3).contains(Term::xor_mask(m2, k));
  const bool mac_safe = !close({Term::mac(m, k)}, rules, 3).contains(k);
  return {recover && reuse && mac_safe, std::string("recover ") + (recover ? "yes" : "no") + ", reuse " +
                                            (reuse ? "yes" : "no") + ", mac leaks key " + (mac_safe ? "no" : "yes")};
}

Outcome properties() {
  const auto t0 = Clock::now();
  const props::Tally t = props::run_suite(220, 4242);
  std::string detail = std::to_string(t.specs) + " specs, " + std::to_string(t.traces) + " traces, " +
                       std::to_string(t.deltas) + " deltas, " + std::to_string(t.failures.size()) + " failure(s) in " +
                       fmt(seconds_since(t0));
  if (!t.failures.empty()) detail += "; first: " + t.failures.front();
  return {t.failures.empty() && t.specs >= 200, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 pairing protocol: single keypad conflict", pairing_conflict},
      {"2 pairing protocol without keypad observation: no conflicts", pairing_counterfactual},
      {"3 shared-key challenge-response: keystream attack found and replayed", keystream_attack},
      {"4 shared-key challenge-response with fresh keys: queries hold", keystream_fixed},
      {"5 registration protocol: no conflicts, all queries hold", registration},
      {"6 deduction agrees with brute-force enumeration", deduction_oracle},
      {"7 xor keystream rules", xor_rules},
      {"8 randomized property suite", properties},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.ok) ++failed;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << " (" << o.detail << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
