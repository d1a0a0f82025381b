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

#include "protoscope/report.hpp"

#include <algorithm>
#include <sstream>

namespace protoscope {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ReportFormatError("malformed report: " + what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string str_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' is not a string");
  return v.get<std::string>();
}

StepId parse_step(const std::string& s) {
  StepId id;
  try {
    std::size_t dot = s.find('.');
    std::size_t used = 0;
    id.major = std::stoi(s.substr(0, dot), &used);
    if (used != (dot == std::string::npos ? s.size() : dot)) bad("step '" + s + "'");
    if (dot != std::string::npos) {
      id.minor = std::stoi(s.substr(dot + 1), &used);
      if (used != s.size() - dot - 1) bad("step '" + s + "'");
    }
  } catch (const std::logic_error&) {
    bad("step '" + s + "'");
  }
  return id;
}

template <typename T, typename F>
T parse_enum(const std::string& s, F&& parser, const char* what) {
  auto v = parser(s);
  if (!v) bad(std::string("unknown ") + what + " '" + s + "'");
  return *v;
}

std::string join(const std::vector<Term>& ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + ts[i].str();
  return s;
}

Json args_json(const std::vector<Term>& args) {
  Json a = Json::array();
  for (const Term& t : args) a.push_back(to_json(t));
  return a;
}

std::vector<Term> args_from(const Json& j) {
  if (!j.is_array()) bad("args is not an array");
  std::vector<Term> out;
  for (const Json& x : j) out.push_back(term_from_json(x));
  return out;
}

Json to_json(const Derivation& d) {
  Json j{{"conclusion", to_json(d.conclusion)}, {"rule", d.rule}, {"premises", Json::array()}};
  for (const Derivation& p : d.premises) j["premises"].push_back(to_json(p));
  return j;
}

Derivation derivation_from_json(const Json& j) {
  Derivation d{term_from_json(field(j, "conclusion")), str_field(j, "rule"), {}};
  for (const Json& p : field(j, "premises")) d.premises.push_back(derivation_from_json(p));
  return d;
}

}  // namespace

Json to_json(const Term& t) {
  switch (t.kind()) {
    case TermKind::atom: return Json{{"atom", t.name()}, {"sort", std::string(to_string(t.sort()))}};
    case TermKind::var: return Json{{"var", t.name()}};
    default: {
      Json args = Json::array();
      for (std::size_t i = 0; i < t.arity(); ++i) args.push_back(to_json(t.arg(i)));
      return Json{{"op", std::string(to_string(t.kind()))}, {"args", args}};
    }
  }
}

Term term_from_json(const Json& j) {
  if (!j.is_object()) bad("term is not an object");
  if (j.contains("atom")) return Term::atom(str_field(j, "atom"), parse_enum<Sort>(str_field(j, "sort"), parse_sort, "sort"));
  if (j.contains("var")) return Term::var(str_field(j, "var"));
  const std::string op = str_field(j, "op");
  std::vector<Term> a = args_from(field(j, "args"));
  auto need = [&](std::size_t n) {
    if (a.size() != n) bad("'" + op + "' takes " + std::to_string(n) + " arguments");
  };
  if (op == "hash") {
    need(1);
    return Term::hash(a[0]);
  }
  need(2);
  if (op == "pair") return Term::pair(a[0], a[1]);
  if (op == "senc") return Term::senc(a[0], a[1]);
  if (op == "mac") return Term::mac(a[0], a[1]);
  if (op == to_string(TermKind::xor_mask)) return Term::xor_mask(a[0], a[1]);
  bad("unknown constructor '" + op + "'");
}

Json to_json(const Query& q) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SecrecyQuery>) return Json{{"kind", "secrecy"}, {"target", to_json(x.target)}};
        if constexpr (std::is_same_v<T, AuthQuery>)
          return Json{{"kind", "auth"}, {"claimant", x.claimant}, {"peer", x.peer}, {"element", x.element}};
        if constexpr (std::is_same_v<T, UniqueQuery>) return Json{{"kind", "unique"}, {"element", x.element}};
      },
      q);
}

Query query_from_json(const Json& j) {
  const std::string kind = str_field(j, "kind");
  if (kind == "secrecy") return SecrecyQuery{term_from_json(field(j, "target"))};
  if (kind == "auth") return AuthQuery{str_field(j, "claimant"), str_field(j, "peer"), str_field(j, "element")};
  if (kind == "unique") return UniqueQuery{str_field(j, "element")};
  bad("unknown query kind '" + kind + "'");
}

Json to_json(const ConflictReport& r) {
  Json conflicts = Json::array();
  for (const Conflict& c : r.conflicts)
    conflicts.push_back(Json{{"step", c.step.str()},
                             {"element", c.element},
                             {"property", std::string(to_string(c.property))},
                             {"capability", std::string(to_string(c.capability))},
                             {"rule", c.rule},
                             {"explanation", c.explanation}});
  return Json{{"verdict", r.verdict == ConflictReport::Verdict::pass ? "pass" : "fail"}, {"conflicts", conflicts}};
}

ConflictReport conflict_report_from_json(const Json& j) {
  ConflictReport r;
  const std::string verdict = str_field(j, "verdict");
  if (verdict != "pass" && verdict != "fail") bad("verdict '" + verdict + "'");
  r.verdict = verdict == "pass" ? ConflictReport::Verdict::pass : ConflictReport::Verdict::fail;
  const Json& cs = field(j, "conflicts");
  if (!cs.is_array()) bad("conflicts is not an array");
  for (const Json& c : cs) {
    r.conflicts.push_back(Conflict{parse_step(str_field(c, "step")), str_field(c, "element"),
                                   parse_enum<TrustProperty>(str_field(c, "property"), parse_property, "property"),
                                   parse_enum<Capability>(str_field(c, "capability"), parse_capability, "capability"),
                                   str_field(c, "rule"), str_field(c, "explanation")});
  }
  if ((r.verdict == ConflictReport::Verdict::pass) != r.conflicts.empty()) bad("verdict disagrees with conflicts");
  return r;
}

std::string render_text(const ConflictReport& r) {
  std::ostringstream out;
  if (r.conflicts.empty()) {
    out << "phase 1: pass, no requirement conflicts (" << kPhase1Label << ")\n";
    return out.str();
  }
  out << "phase 1: fail, " << r.conflicts.size() << (r.conflicts.size() == 1 ? " conflict\n" : " conflicts\n");
  for (const Conflict& c : r.conflicts)
    out << "  step " << c.step.str() << "  " << c.element << "  " << to_string(c.property) << "  defeated by "
        << to_string(c.capability) << " [" << c.rule << "]\n    " << c.explanation << "\n";
  return out.str();
}

Json to_json(const TraceEvent& e) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HonestSend>)
          return Json{{"kind", "HonestSend"},
                      {"session", x.session},
                      {"step", x.step.str()},
                      {"channel", std::string(to_string(x.channel))},
                      {"term", to_json(x.term)}};
        if constexpr (std::is_same_v<T, HonestReceive>)
          return Json{{"kind", "HonestReceive"}, {"session", x.session}, {"step", x.step.str()}, {"term", to_json(x.term)}};
        if constexpr (std::is_same_v<T, AttackerLearn>)
          return Json{{"kind", "AttackerLearn"}, {"rule", x.rule}, {"term", to_json(x.term)}};
        if constexpr (std::is_same_v<T, AttackerInject>)
          return Json{{"kind", "AttackerInject"}, {"channel", std::string(to_string(x.channel))}, {"term", to_json(x.term)}};
        if constexpr (std::is_same_v<T, BeginEvent>)
          return Json{{"kind", "Begin"}, {"session", x.session}, {"label", x.label}, {"args", args_json(x.args)}};
        if constexpr (std::is_same_v<T, EndEvent>)
          return Json{{"kind", "End"}, {"session", x.session}, {"label", x.label}, {"args", args_json(x.args)}};
      },
      e);
}

TraceEvent event_from_json(const Json& j) {
  const std::string kind = str_field(j, "kind");
  auto channel = [&] { return parse_enum<ChannelClass>(str_field(j, "channel"), parse_channel, "channel"); };
  if (kind == "HonestSend")
    return HonestSend{str_field(j, "session"), parse_step(str_field(j, "step")), channel(), term_from_json(field(j, "term"))};
  if (kind == "HonestReceive")
    return HonestReceive{str_field(j, "session"), parse_step(str_field(j, "step")), term_from_json(field(j, "term"))};
  if (kind == "AttackerLearn") return AttackerLearn{term_from_json(field(j, "term")), str_field(j, "rule")};
  if (kind == "AttackerInject") return AttackerInject{channel(), term_from_json(field(j, "term"))};
  if (kind == "Begin") return BeginEvent{str_field(j, "session"), str_field(j, "label"), args_from(field(j, "args"))};
  if (kind == "End") return EndEvent{str_field(j, "session"), str_field(j, "label"), args_from(field(j, "args"))};
  bad("unknown event kind '" + kind + "'");
}

Json to_json(const AttackTrace& t) {
  Json events = Json::array();
  for (const TraceEvent& e : t.events) events.push_back(to_json(e));
  Json j{{"violated", to_json(t.violated)},
         {"sessions_per_role", t.sessions_per_role},
         {"attacker_fresh_budget", t.attacker_fresh_budget},
         {"witness", t.witness},
         {"events", events}};
  if (t.derivation) j["derivation"] = to_json(*t.derivation);
  return j;
}

AttackTrace trace_from_json(const Json& j) {
  AttackTrace t{{}, query_from_json(field(j, "violated")), 1, 0, std::nullopt, str_field(j, "witness")};
  const Json& s = field(j, "sessions_per_role");
  const Json& b = field(j, "attacker_fresh_budget");
  if (!s.is_number_integer() || !b.is_number_integer()) bad("session bounds are not integers");
  t.sessions_per_role = s.get<int>();
  t.attacker_fresh_budget = b.get<int>();
  const Json& events = field(j, "events");
  if (!events.is_array()) bad("events is not an array");
  for (const Json& e : events) t.events.push_back(event_from_json(e));
  if (j.contains("derivation")) t.derivation = derivation_from_json(j.at("derivation"));
  return t;
}

std::string render_event(const TraceEvent& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HonestSend>)
          return "HonestSend " + x.session + " step " + x.step.str() + " over " + std::string(to_string(x.channel)) +
                 ": " + x.term.str();
        if constexpr (std::is_same_v<T, HonestReceive>)
          return "HonestReceive " + x.session + " step " + x.step.str() + ": " + x.term.str();
        if constexpr (std::is_same_v<T, AttackerLearn>) return "AttackerLearn " + x.term.str() + " by " + x.rule;
        if constexpr (std::is_same_v<T, AttackerInject>)
          return "AttackerInject over " + std::string(to_string(x.channel)) + ": " + x.term.str();
        if constexpr (std::is_same_v<T, BeginEvent>) return "Begin " + x.session + " " + x.label + "(" + join(x.args) + ")";
        if constexpr (std::is_same_v<T, EndEvent>) return "End " + x.session + " " + x.label + "(" + join(x.args) + ")";
      },
      e);
}

std::string render_text(const AttackTrace& t) {
  std::string out = "# violates: " + describe(t.violated) + "\n# witness: " + t.witness + "\n";
  for (const TraceEvent& e : t.events) out += render_event(e) + "\n";
  return out;
}

Json to_json(const VerificationResult& r) {
  Json verdicts = Json::array();
  bool all = true;
  for (const QueryVerdict& v : r.verdicts) {
    Json j{{"query", describe(v.query)},
           {"spec", to_json(v.query)},
           {"verdict", v.holds() ? "holds_within_bounds" : "violated"}};
    if (v.trace) j["trace"] = to_json(*v.trace);
    all = all && v.holds();
    verdicts.push_back(j);
  }
  return Json{{"verdict", all ? "holds_within_bounds" : "violated"},
              {"sessions_per_role", r.config.sessions_per_role},
              {"attacker_fresh_budget", r.config.attacker_fresh_budget},
              {"queries", verdicts},
              {"statistics",
               {{"states", r.stats.states}, {"transitions", r.stats.transitions}, {"max_closure", r.stats.max_closure}}}};
}

VerificationResult verification_from_json(const Json& j) {
  VerificationResult r;
  r.config.sessions_per_role = field(j, "sessions_per_role").get<int>();
  r.config.attacker_fresh_budget = field(j, "attacker_fresh_budget").get<int>();
  const Json& qs = field(j, "queries");
  if (!qs.is_array()) bad("queries is not an array");
  for (const Json& q : qs) {
    QueryVerdict v{query_from_json(field(q, "spec")), std::nullopt};
    const std::string verdict = str_field(q, "verdict");
    if (verdict == "violated") {
      v.trace = trace_from_json(field(q, "trace"));
    } else if (verdict != "holds_within_bounds") {
      bad("verdict '" + verdict + "'");
    }
    r.verdicts.push_back(std::move(v));
  }
  const Json& st = field(j, "statistics");
  r.stats.states = field(st, "states").get<std::size_t>();
  r.stats.transitions = field(st, "transitions").get<std::size_t>();
  r.stats.max_closure = field(st, "max_closure").get<std::size_t>();
  return r;
}

std::string render_text(const VerificationResult& r) {
  std::ostringstream out;
  bool all = true;
  for (const QueryVerdict& v : r.verdicts) {
    out << (v.holds() ? "holds within bounds  " : "VIOLATED             ") << describe(v.query) << "\n";
    if (v.trace) out << "    " << v.trace->witness << " (" << v.trace->events.size() << " events)\n";
    all = all && v.holds();
  }
  out << "sessions per role " << r.config.sessions_per_role << ", " << r.stats.states << " states, "
      << r.stats.transitions << " transitions, max closure " << r.stats.max_closure << ", " << r.stats.wall_ms
      << " ms\n";
  if (all)
    out << "phase 2: all queries hold within bounds (" << kPhase2Label << ")\n";
  else
    out << "phase 2: violation found\n";
  return out.str();
}

std::vector<DefeatRule> apply_rule_overrides(std::vector<DefeatRule> base, const Json& j) {
  if (!j.is_object()) bad("rules file is not an object");
  if (j.contains("disable")) {
    for (const Json& n : j.at("disable")) {
      if (!n.is_string()) bad("disable entries must be strings");
      auto it = std::find_if(base.begin(), base.end(), [&](const DefeatRule& r) { return r.name == n.get<std::string>(); });
      if (it == base.end()) bad("no rule named '" + n.get<std::string>() + "' to disable");
      base.erase(it);
    }
  }
  if (j.contains("rules")) {
    for (const Json& r : j.at("rules")) {
      DefeatRule rule{str_field(r, "name"),
                      parse_enum<Capability>(str_field(r, "capability"), parse_capability, "capability"),
                      parse_enum<TrustProperty>(str_field(r, "defeats"), parse_property, "property"),
                      parse_enum<DefeatCondition>(str_field(r, "condition"), parse_condition, "condition")};
      auto it = std::find_if(base.begin(), base.end(), [&](const DefeatRule& x) { return x.name == rule.name; });
      if (it != base.end())
        *it = rule;
      else
        base.push_back(rule);
    }
  }
  return base;
}

}  // namespace protoscope
