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

#include <chrono>
#include <deque>
#include <memory>
#include <unordered_map>

#include "protoscope/engine.hpp"
#include "runtime.hpp"

namespace protoscope {

namespace {

using detail::Instance;
using detail::Runtime;
using Event = std::pair<std::string, std::vector<Term>>;

struct Message {
  StepId step;
  std::string to;
  Term term;
};

struct State {
  std::vector<Instance> inst;
  std::shared_ptr<const KnowledgeSet> kb;
  std::vector<Message> pending;
  std::set<Event> begins;
  std::set<Event> accepts;
  int atk_used = 0;
};

struct Node {
  std::size_t parent;
  std::vector<TraceEvent> events;
};

struct Key {
  std::uint64_t a, b;
  bool operator==(const Key&) const = default;
};
struct KeyHash {
  std::size_t operator()(const Key& k) const { return k.a ^ (k.b * 0x9e3779b97f4a7c15ULL); }
};

Key fingerprint(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return {h, std::hash<std::string>{}(s)};
}

std::string base_name(const std::string& atom) { return atom.substr(0, atom.find('@')); }

template <typename F>
void product(const std::vector<std::vector<Term>>& lists, F&& fn) {
  if (std::any_of(lists.begin(), lists.end(), [](const auto& l) { return l.empty(); })) return;
  std::vector<std::size_t> idx(lists.size(), 0);
  std::vector<Term> pick;
  while (true) {
    pick.clear();
    for (std::size_t k = 0; k < lists.size(); ++k) pick.push_back(lists[k][idx[k]]);
    fn(pick);
    std::size_t k = lists.size();
    while (k > 0) {
      --k;
      if (++idx[k] < lists[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (lists.empty()) return;
  }
}

Term rebuild(TermKind kind, const std::vector<Term>& args) {
  switch (kind) {
    case TermKind::pair: return Term::pair(args[0], args[1]);
    case TermKind::senc: return Term::senc(args[0], args[1]);
    case TermKind::mac: return Term::mac(args[0], args[1]);
    case TermKind::hash: return Term::hash(args[0]);
    default: return Term::xor_mask(args[0], args[1]);
  }
}

void dedup(std::vector<Term>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Same constructor skeleton as `shape`, atoms anywhere the shape has one.
bool like(const Term& shape, const Term& t) {
  if (shape.is_atom()) return t.is_atom();
  if (shape.kind() != t.kind()) return false;
  for (std::size_t i = 0; i < shape.arity(); ++i)
    if (!like(shape.arg(i), t.arg(i))) return false;
  return true;
}

class Search {
 public:
  Search(const ProtocolModel& model, const AttackerModel& attacker, const SessionConfig& config,
         const std::vector<Query>& queries)
      : rt_(model, attacker), model_(model), config_(config), queries_(queries) {
    depth_ = config.depth_bound.value_or(model.default_depth_bound);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      std::string label;
      if (auto* a = std::get_if<AuthQuery>(&queries[q])) label = auth_label(*a);
      if (auto* u = std::get_if<UniqueQuery>(&queries[q])) label = unique_label(*u);
      if (label.empty()) continue;
      bool compiled = false;
      for (const RoleProcess& p : model.processes)
        for (const Action& a : p.actions)
          if (a.kind == Action::Kind::end && a.label == label) compiled = true;
      if (!compiled) throw CompileError("query '" + describe(queries[q]) + "' has no acceptance event in the model");
      by_label_[label].push_back(q);
    }
    for (const Query& q : queries) result_.verdicts.push_back(QueryVerdict{q, std::nullopt});
    result_.config = config;
    cost_.resize(queries.size());
  }

  VerificationResult run() {
    const auto start = std::chrono::steady_clock::now();
    State root;
    for (std::size_t p = 0; p < model_.processes.size(); ++p)
      for (int s = 1; s <= config_.sessions_per_role; ++s) root.inst.push_back(Instance{p, s, 0, false, {}});
    auto init = rt_.initial_knowledge(config_.attacker_fresh_budget);
    root.kb = std::make_shared<KnowledgeSet>(
        close(std::set<Term>(init.begin(), init.end()), standard_rules(), depth_, config_.closure_ceiling));
    Node root_node{0, {}};
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < root.inst.size(); ++i) settle(root, i, root_node.events, flagged);
    nodes_.push_back(std::move(root_node));
    best_.emplace(fingerprint(key(root)), 0);
    result_.stats.states = 1;
    note(root, 0, flagged, 0);

    // Uniform-cost order: states reachable with fewer injections come first,
    // breadth-first within the same number of injections.
    std::vector<std::deque<std::pair<State, std::size_t>>> levels(1);
    levels[0].emplace_back(std::move(root), 0);
    for (std::size_t level = 0; level < levels.size() && !settled(level); ++level) {
      while (!levels[level].empty() && !settled(level)) {
        auto [state, node] = std::move(levels[level].front());
        levels[level].pop_front();
        for (auto& [next, events, flags, injected] : successors(state)) {
          ++result_.stats.transitions;
          const std::size_t cost = level + (injected ? 1 : 0);
          auto [it, fresh] = best_.try_emplace(fingerprint(key(next)), cost);
          if (!fresh) {
            if (it->second <= cost) continue;
            it->second = cost;
          } else if (++result_.stats.states > config_.state_ceiling) {
            result_.stats.wall_ms = elapsed(start);
            throw SearchBudgetExceeded(config_.state_ceiling, result_.stats);
          }
          nodes_.push_back(Node{node, std::move(events)});
          note(next, nodes_.size() - 1, flags, cost);
          if (levels.size() <= cost) levels.resize(cost + 1);
          levels[cost].emplace_back(std::move(next), nodes_.size() - 1);
        }
      }
      levels[level].clear();
    }
    result_.stats.wall_ms = elapsed(start);
    return std::move(result_);
  }

 private:
  using Successor = std::tuple<State, std::vector<TraceEvent>, std::vector<std::size_t>, bool>;

  // Every query has its cheapest violation once none can be found at a
  // lower injection count than `level`.
  bool settled(std::size_t level) const {
    return std::all_of(cost_.begin(), cost_.end(), [&](const auto& c) { return c && *c <= level; });
  }

  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  std::string key(const State& s) const {
    std::string k;
    for (const Instance& i : s.inst) {
      // Aborted instances never act again; what they held is irrelevant.
      if (i.aborted) {
        k += "!;";
        continue;
      }
      k += std::to_string(i.pc);
      k += '{';
      for (const auto& [n, v] : i.env) k += n + '=' + v.str() + ';';
      k += '}';
    }
    k += '|';
    for (const Term& t : s.kb->base()) k += t.str() + ',';
    k += '|';
    std::vector<std::string> msgs;
    for (const Message& m : s.pending) msgs.push_back(m.step.str() + ">" + m.to + ":" + m.term.str());
    std::sort(msgs.begin(), msgs.end());
    for (const auto& m : msgs) k += m + ',';
    for (const auto* set : {&s.begins, &s.accepts}) {
      k += '|';
      for (const auto& [label, args] : *set) {
        k += label;
        for (const Term& a : args) k += ' ' + a.str();
        k += ',';
      }
    }
    k += '|' + std::to_string(s.atk_used);
    return k;
  }

  void learn(State& s, const std::vector<Term>& parts, std::vector<TraceEvent>& ev) {
    const KnowledgeSet& old = *s.kb;
    const std::size_t before = old.analyzed().size();
    std::vector<Term> fresh;
    for (const Term& p : parts)
      if (!old.base().count(p) && std::find(fresh.begin(), fresh.end(), p) == fresh.end()) fresh.push_back(p);
    for (const Term& p : parts) result_.observed.insert(p);
    if (fresh.empty()) return;
    auto next = std::make_shared<KnowledgeSet>(old.extend(fresh, config_.closure_ceiling));
    for (const Term& p : fresh) ev.push_back(AttackerLearn{p, "observe"});
    const auto& members = next->analyzed();
    for (std::size_t j = before; j < members.size(); ++j) {
      if (std::find(fresh.begin(), fresh.end(), members[j]) != fresh.end()) continue;
      ev.push_back(AttackerLearn{members[j], next->witnesses().at(members[j]).rule});
    }
    result_.stats.max_closure = std::max(result_.stats.max_closure, members.size());
    s.kb = std::move(next);
  }

  std::vector<Term> eval_all(const std::vector<Term>& exprs, const Instance& i) const {
    std::vector<Term> out;
    for (const Term& e : exprs) {
      auto v = rt_.eval(e, i);
      if (!v) throw std::logic_error(rt_.label(i) + ": cannot evaluate " + e.str());
      out.push_back(*v);
    }
    return out;
  }

  // Runs instance `idx` up to its next receive (or its end).
  void settle(State& s, std::size_t idx, std::vector<TraceEvent>& ev, std::vector<std::size_t>& flagged) {
    while (true) {
      Instance& i = s.inst[idx];
      if (!rt_.run_local(i)) return;
      const Action* a = rt_.current(i);
      if (!a || a->kind == Action::Kind::receive) return;
      const std::string who = rt_.label(i);
      if (a->kind == Action::Kind::send) {
        std::vector<Term> parts = eval_all(a->parts, i);
        Term msg = Term::tuple(parts);
        ev.push_back(HonestSend{who, a->step, *a->channel, msg});
        s.pending.push_back(Message{a->step, a->peer, msg});
        std::vector<Term> seen;
        for (std::size_t k = 0; k < parts.size(); ++k)
          if (rt_.observable(*a->channel, a->elements[k])) seen.push_back(parts[k]);
        ++i.pc;
        if (!seen.empty()) learn(s, seen, ev);
        continue;
      }
      Event e{a->label, eval_all(a->args, i)};
      if (a->kind == Action::Kind::begin) {
        ev.push_back(BeginEvent{who, e.first, e.second});
        s.begins.insert(e);
      } else {
        ev.push_back(EndEvent{who, e.first, e.second});
        bool bad = false;
        if (e.first.rfind("auth:", 0) == 0) {
          bad = !s.begins.count(e);
        } else {
          bad = !s.accepts.insert(e).second;
        }
        if (bad)
          if (auto it = by_label_.find(e.first); it != by_label_.end())
            for (std::size_t q : it->second) flagged.push_back(q);
      }
      ++s.inst[idx].pc;
    }
  }

  std::vector<Term> pool(const std::string& symbol, const State& s) const {
    std::vector<Term> out;
    for (const Term& t : s.kb->atoms())
      if (base_name(t.name()) == symbol) out.push_back(t);
    const int n = std::min(s.atk_used + 1, config_.attacker_fresh_budget);
    for (int k = 1; k <= n; ++k) out.push_back(Runtime::attacker_atom(k));
    return out;
  }

  // Values the receiver already holds are fixed; anything else would fail
  // its later checks.
  std::vector<Term> instantiate_shape(const Term& shape, const Instance& i, const State& s) const {
    if (shape.is_atom()) {
      if (auto bound = i.env.find(shape.name()); bound != i.env.end()) return {bound->second};
      auto it = model_.symbols.find(shape.name());
      if (it != model_.symbols.end() && it->second.kind == Symbol::Kind::global_atom) return {shape};
      return pool(shape.name(), s);
    }
    std::vector<std::vector<Term>> lists;
    for (std::size_t k = 0; k < shape.arity(); ++k) lists.push_back(instantiate_shape(shape.arg(k), i, s));
    std::vector<Term> out;
    product(lists, [&](const std::vector<Term>& args) { out.push_back(rebuild(shape.kind(), args)); });
    return out;
  }

  std::vector<Term> candidates(const Pattern& p, const Instance& i, const State& s) const {
    std::vector<Term> out;
    switch (p.kind) {
      case Pattern::Kind::known:
        if (auto v = rt_.eval(p.expr, i)) out.push_back(*v);
        break;
      case Pattern::Kind::pair:
        product({candidates(p.parts[0], i, s), candidates(p.parts[1], i, s)},
                [&](const std::vector<Term>& a) { out.push_back(Term::pair(a[0], a[1])); });
        break;
      case Pattern::Kind::decrypt: {
        auto key = rt_.eval(p.expr, i);
        if (!key) break;
        for (const Term& m : candidates(p.parts[0], i, s))
          out.push_back(p.cipher == TermKind::senc ? Term::senc(m, *key) : Term::xor_mask(m, *key));
        break;
      }
      case Pattern::Kind::bind:
        if (p.shape.is_atom()) {
          out = pool(p.shape.name(), s);
        } else {
          out = instantiate_shape(p.shape, i, s);
          for (const Term& t : s.kb->analyzed())
            if (like(p.shape, t)) out.push_back(t);
        }
        break;
    }
    dedup(out);
    return out;
  }

  std::vector<Successor> successors(const State& s) {
    std::vector<Successor> out;
    for (std::size_t idx = 0; idx < s.inst.size(); ++idx) {
      const Instance& i = s.inst[idx];
      const Action* a = rt_.current(i);
      if (!a || a->kind != Action::Kind::receive) continue;
      const std::string& me = rt_.process(i).principal;

      auto accept = [&](const Term& msg, std::optional<std::size_t> pending, bool injected) {
        auto parts = Runtime::split(msg, a->patterns.size());
        if (!parts) return;
        State next = s;
        Instance& ni = next.inst[idx];
        for (std::size_t k = 0; k < parts->size(); ++k)
          if (!rt_.match(a->patterns[k], (*parts)[k], ni)) return;
        ++ni.pc;
        std::vector<TraceEvent> ev;
        if (pending) next.pending.erase(next.pending.begin() + static_cast<std::ptrdiff_t>(*pending));
        if (injected) {
          ev.push_back(AttackerInject{*a->channel, msg});
          for (const Term& atom : atoms_of(msg))
            if (atom.name().rfind("atk", 0) == 0 && atom.name().find('@') == std::string::npos)
              next.atk_used = std::max(next.atk_used, std::stoi(atom.name().substr(3)));
        }
        ev.push_back(HonestReceive{rt_.label(i), a->step, msg});
        std::vector<std::size_t> flagged;
        settle(next, idx, ev, flagged);
        out.emplace_back(std::move(next), std::move(ev), std::move(flagged), injected);
      };

      std::set<Term> offered;
      for (std::size_t m = 0; m < s.pending.size(); ++m) {
        const Message& msg = s.pending[m];
        if (msg.step != a->step || msg.to != me || !offered.insert(msg.term).second) continue;
        accept(msg.term, m, false);
      }
      if (!rt_.injectable(*a->channel, a->elements)) continue;
      std::vector<std::vector<Term>> lists;
      for (const Pattern& p : a->patterns) {
        std::vector<Term> ok;
        for (const Term& t : candidates(p, i, s))
          if (t.depth() <= depth_ && s.kb->contains(t)) ok.push_back(t);
        lists.push_back(std::move(ok));
      }
      product(lists, [&](const std::vector<Term>& parts) {
        Term msg = Term::tuple(parts);
        if (!offered.count(msg)) accept(msg, std::nullopt, true);
      });
    }
    return out;
  }

  // Records the first violation of each still-open query reached in `s`.
  bool improves(std::size_t q, std::size_t cost) const { return !cost_[q] || *cost_[q] > cost; }

  void note(const State& s, std::size_t node, const std::vector<std::size_t>& flagged, std::size_t cost) {
    for (std::size_t q : flagged) {
      if (!improves(q, cost)) continue;
      AttackTrace t = trace_to(node, q);
      const std::string label = std::holds_alternative<AuthQuery>(queries_[q])
                                    ? auth_label(std::get<AuthQuery>(queries_[q]))
                                    : unique_label(std::get<UniqueQuery>(queries_[q]));
      // The trace stops at the offending acceptance.
      auto last = std::find_if(t.events.rbegin(), t.events.rend(), [&](const TraceEvent& e) {
        auto* x = std::get_if<EndEvent>(&e);
        return x && x->label == label;
      });
      t.events.erase(last.base(), t.events.end());
      const EndEvent end = std::get<EndEvent>(t.events.back());
      std::string args;
      for (const Term& a : end.args) args += (args.empty() ? "" : ", ") + a.str();
      if (std::holds_alternative<AuthQuery>(queries_[q]))
        t.witness = end.session + " accepts (" + args + ") without a matching send";
      else
        t.witness = end.session + " accepts " + args + " a second time";
      result_.verdicts[q].trace = std::move(t);
      cost_[q] = cost;
    }
    for (std::size_t q = 0; q < queries_.size(); ++q) {
      auto* sq = std::get_if<SecrecyQuery>(&queries_[q]);
      if (!sq || !improves(q, cost)) continue;
      for (const Term& v : rt_.secrecy_values(*sq, s.inst)) {
        auto d = s.kb->derivation(v);
        if (!d) continue;
        AttackTrace t = trace_to(node, q);
        bool learned = std::any_of(t.events.begin(), t.events.end(), [&](const TraceEvent& e) {
          auto* l = std::get_if<AttackerLearn>(&e);
          return l && l->term == v;
        });
        if (!learned) t.events.push_back(AttackerLearn{v, d->rule.empty() ? "observe" : d->rule});
        t.derivation = std::move(d);
        t.witness = "attacker derives " + v.str();
        result_.verdicts[q].trace = std::move(t);
        cost_[q] = cost;
        break;
      }
    }
  }

  AttackTrace trace_to(std::size_t node, std::size_t q) const {
    std::vector<std::size_t> path;
    for (std::size_t n = node;; n = nodes_[n].parent) {
      path.push_back(n);
      if (n == 0) break;
    }
    AttackTrace t{{}, queries_[q], config_.sessions_per_role, config_.attacker_fresh_budget, std::nullopt, ""};
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      t.events.insert(t.events.end(), nodes_[*it].events.begin(), nodes_[*it].events.end());
    return t;
  }

  Runtime rt_;
  const ProtocolModel& model_;
  SessionConfig config_;
  const std::vector<Query>& queries_;
  std::size_t depth_ = 0;
  std::map<std::string, std::vector<std::size_t>> by_label_;
  std::vector<Node> nodes_;
  std::unordered_map<Key, std::size_t, KeyHash> best_;
  VerificationResult result_;
  std::vector<std::optional<std::size_t>> cost_;
};

}  // namespace

VerificationResult explore(const ProtocolModel& model, const AttackerModel& attacker, const SessionConfig& config,
                           const std::vector<Query>& queries) {
  if (config.sessions_per_role < 1) throw std::invalid_argument("sessions_per_role must be at least 1");
  if (config.attacker_fresh_budget < 0) throw std::invalid_argument("attacker_fresh_budget must be non-negative");
  return Search(model, attacker, config, queries).run();
}

}  // namespace protoscope
