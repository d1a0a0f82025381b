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

#include "protoscope/engine.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "runtime.hpp"

namespace protoscope {

namespace {

bool has_cap(const std::vector<EffectiveCapability>& caps, Capability c) {
  return std::any_of(caps.begin(), caps.end(), [&](const EffectiveCapability& e) { return e.capability == c; });
}

class Compiler {
 public:
  explicit Compiler(const ProtocolSpec& spec) : spec_(spec) {}

  ProtocolModel run() {
    model_.name = spec_.name;
    model_.symbols = spec_.symbols;
    model_.public_terms = spec_.public_terms;
    model_.queries = spec_.queries;
    model_.default_depth_bound = 2 + spec_.max_term_depth();
    for (const Principal& p : spec_.principals) {
      model_.principals.push_back(p.id);
      proc_of_[p.id] = model_.processes.size();
      model_.processes.push_back(RoleProcess{p.id, {}});
    }
    for (const Principal& p : spec_.principals) {
      auto& k = known_[p.id];
      for (const Principal& q : spec_.principals) k.insert(q.id);
      for (const Term& t : p.initial_knowledge)
        for (const Term& a : atoms_of(t)) k.insert(a.name());
      for (const Term& t : spec_.public_terms)
        for (const Term& a : atoms_of(t)) k.insert(a.name());
    }
    for (const StepSpec& s : spec_.steps) compile_step(s);
    for (const Query& q : spec_.queries) {
      if (auto* a = std::get_if<AuthQuery>(&q)) add_auth(*a);
      if (auto* u = std::get_if<UniqueQuery>(&q)) add_unique(*u);
    }
    apply_insertions();
    return std::move(model_);
  }

 private:
  struct Insertion {
    std::size_t process;
    std::size_t pos;
    std::size_t order;
    Action action;
  };

  std::vector<Action>& actions(const std::string& principal) { return model_.processes[proc_of_.at(principal)].actions; }

  static Term element_atom(const std::string& name) { return Term::atom(name, Sort::data); }

  bool is_element(const std::string& name) const {
    auto it = spec_.symbols.find(name);
    return it != spec_.symbols.end() && it->second.kind == Symbol::Kind::element;
  }

  Term expand(const Term& t) const {
    if (t.is_atom()) {
      auto it = spec_.symbols.find(t.name());
      if (it != spec_.symbols.end() && it->second.kind == Symbol::Kind::element && it->second.definition)
        return expand(*it->second.definition);
      return t;
    }
    switch (t.kind()) {
      case TermKind::pair: return Term::pair(expand(t.arg(0)), expand(t.arg(1)));
      case TermKind::senc: return Term::senc(expand(t.arg(0)), expand(t.arg(1)));
      case TermKind::mac: return Term::mac(expand(t.arg(0)), expand(t.arg(1)));
      case TermKind::hash: return Term::hash(expand(t.arg(0)));
      case TermKind::xor_mask: return Term::xor_mask(expand(t.arg(0)), expand(t.arg(1)));
      default: return t;
    }
  }

  static bool all_known(const Term& t, const std::set<std::string>& k) {
    auto atoms = atoms_of(t);
    return std::all_of(atoms.begin(), atoms.end(), [&](const Term& a) { return k.count(a.name()) > 0; });
  }

  Pattern opaque(const Term& t, StepId step) {
    Pattern p;
    p.kind = Pattern::Kind::bind;
    p.symbol = "#" + step.str() + "." + std::to_string(anon_++);
    p.shape = expand(t);
    return p;
  }

  Pattern pattern(const Term& t, std::set<std::string>& k, StepId step) {
    Pattern p;
    switch (t.kind()) {
      case TermKind::atom:
        if (k.count(t.name())) {
          p.kind = Pattern::Kind::known;
          p.expr = t;
        } else {
          p.kind = Pattern::Kind::bind;
          p.symbol = t.name();
          p.shape = expand(t);
          k.insert(t.name());
        }
        return p;
      case TermKind::pair:
        p.kind = Pattern::Kind::pair;
        p.parts.push_back(pattern(t.arg(0), k, step));
        p.parts.push_back(pattern(t.arg(1), k, step));
        return p;
      case TermKind::senc:
      case TermKind::xor_mask:
        if (all_known(t.arg(1), k)) {
          p.kind = Pattern::Kind::decrypt;
          p.cipher = t.kind();
          p.expr = t.arg(1);
          p.parts.push_back(pattern(t.arg(0), k, step));
          return p;
        }
        [[fallthrough]];
      default:
        if (all_known(t, k)) {
          p.kind = Pattern::Kind::known;
          p.expr = t;
          return p;
        }
        return opaque(t, step);
    }
  }

  void compile_step(const StepSpec& s) {
    auto& out = actions(s.sender);
    auto& k = known_[s.sender];
    for (const std::string& f : s.fresh) {
      Action a;
      a.kind = Action::Kind::fresh;
      a.step = s.id;
      a.symbol = f;
      out.push_back(a);
      k.insert(f);
    }
    auto local = [&](const Element& e) {
      if (e.expr.is_atom() && e.expr.name() == e.name) return;
      Action a;
      a.step = s.id;
      a.symbol = e.name;
      a.expr = e.expr;
      if (k.count(e.name)) {
        a.kind = Action::Kind::check_equal;
        checks_[{s.sender, e.name}].push_back(out.size());
      } else {
        a.kind = Action::Kind::compute;
        k.insert(e.name);
      }
      out.push_back(a);
    };
    for (const Element& e : s.elements) local(e);
    if (s.kind == StepKind::compute) return;

    Action send;
    send.kind = Action::Kind::send;
    send.step = s.id;
    send.channel = s.channel;
    send.peer = *s.receiver;
    for (const Element& e : s.elements) {
      send.elements.push_back(e.name);
      send.parts.push_back(is_element(e.name) ? element_atom(e.name) : e.expr);
    }
    send_at_[{s.sender, s.id}] = out.size();
    out.push_back(send);

    auto& in = actions(*s.receiver);
    auto& rk = known_[*s.receiver];
    Action recv;
    recv.kind = Action::Kind::receive;
    recv.step = s.id;
    recv.channel = s.channel;
    recv.peer = s.sender;
    for (const Element& e : s.elements) {
      recv.elements.push_back(e.name);
      if (rk.count(e.name)) {
        Pattern p;
        p.kind = Pattern::Kind::known;
        p.expr = is_element(e.name) ? element_atom(e.name) : e.expr;
        recv.patterns.push_back(p);
        continue;
      }
      Pattern p = pattern(e.expr, rk, s.id);
      if (!(e.expr.is_atom() && e.expr.name() == e.name)) p.alias = e.name;
      rk.insert(e.name);
      recv.patterns.push_back(std::move(p));
    }
    recv_at_[{*s.receiver, s.id}] = in.size();
    in.push_back(recv);
  }

  // Position just after the last action of `principal` accepting `element`
  // from index `from` on: the receive itself or a later check.
  std::size_t acceptance_after(const std::string& principal, const std::string& element, std::size_t from) const {
    std::size_t pos = from;
    if (auto it = checks_.find({principal, element}); it != checks_.end())
      for (std::size_t c : it->second)
        if (c > pos) pos = c;
    return pos + 1;
  }

  void add_auth(const AuthQuery& q) {
    const StepSpec* step = nullptr;
    for (const StepSpec& s : spec_.steps)
      if (s.kind != StepKind::compute && s.sender == q.claimant && s.receiver == q.peer && s.element(q.element)) {
        step = &s;
        break;
      }
    if (!step)
      throw CompileError("query '" + describe(Query{q}) + "': no step where " + q.claimant + " sends " + q.element +
                         " to " + q.peer);
    std::vector<Term> args{Term::atom(q.claimant, Sort::agent), Term::atom(q.peer, Sort::agent),
                           element_or_atom(q.element)};
    Action begin;
    begin.kind = Action::Kind::begin;
    begin.step = step->id;
    begin.label = auth_label(q);
    begin.args = args;
    insertions_.push_back({proc_of_.at(q.claimant), send_at_.at({q.claimant, step->id}), order_++, begin});
    Action end = begin;
    end.kind = Action::Kind::end;
    std::size_t recv = recv_at_.at({q.peer, step->id});
    insertions_.push_back({proc_of_.at(q.peer), acceptance_after(q.peer, q.element, recv), order_++, end});
  }

  Term element_or_atom(const std::string& name) const {
    auto it = spec_.symbols.find(name);
    if (it == spec_.symbols.end() || it->second.kind == Symbol::Kind::element) return element_atom(name);
    return Term::atom(name, it->second.sort);
  }

  void add_unique(const UniqueQuery& q) {
    for (auto s = spec_.steps.rbegin(); s != spec_.steps.rend(); ++s) {
      if (!s->element(q.element)) continue;
      std::optional<std::pair<std::string, std::size_t>> at;
      if (s->kind != StepKind::compute) {
        std::size_t recv = recv_at_.at({*s->receiver, s->id});
        at = {{*s->receiver, acceptance_after(*s->receiver, q.element, recv)}};
      } else if (auto it = checks_.find({s->sender, q.element}); it != checks_.end()) {
        const auto& acts = model_.processes[proc_of_.at(s->sender)].actions;
        for (std::size_t c : it->second)
          if (acts[c].step == s->id) at = {{s->sender, c + 1}};
      }
      if (!at) continue;
      Action end;
      end.kind = Action::Kind::end;
      end.step = s->id;
      end.label = unique_label(q);
      end.args = {element_or_atom(q.element)};
      insertions_.push_back({proc_of_.at(at->first), at->second, order_++, end});
      return;
    }
    throw CompileError("query '" + describe(Query{q}) + "': no principal ever accepts " + q.element);
  }

  void apply_insertions() {
    std::sort(insertions_.begin(), insertions_.end(), [](const Insertion& a, const Insertion& b) {
      return a.pos != b.pos ? a.pos > b.pos : a.order > b.order;
    });
    for (const Insertion& ins : insertions_) {
      auto& acts = model_.processes[ins.process].actions;
      acts.insert(acts.begin() + static_cast<std::ptrdiff_t>(ins.pos), ins.action);
    }
  }

  const ProtocolSpec& spec_;
  ProtocolModel model_;
  std::map<std::string, std::size_t> proc_of_;
  std::map<std::string, std::set<std::string>> known_;
  std::map<std::pair<std::string, StepId>, std::size_t> send_at_, recv_at_;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> checks_;
  std::vector<Insertion> insertions_;
  std::size_t order_ = 0;
  int anon_ = 0;
};

std::string describe(const Pattern& p) {
  std::string s;
  switch (p.kind) {
    case Pattern::Kind::bind: s = "?" + p.symbol; break;
    case Pattern::Kind::known: s = "=" + p.expr.str(); break;
    case Pattern::Kind::pair: s = "pair(" + describe(p.parts[0]) + "," + describe(p.parts[1]) + ")"; break;
    case Pattern::Kind::decrypt:
      s = std::string(p.cipher == TermKind::senc ? "senc" : "xor") + "(" + describe(p.parts[0]) + "," + p.expr.str() +
          ")";
      break;
  }
  if (!p.alias.empty()) s = p.alias + "@" + s;
  return s;
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + ts[i].str();
  return s;
}

}  // namespace

std::string auth_label(const AuthQuery& q) { return "auth:" + q.claimant + ":" + q.peer + ":" + q.element; }
std::string unique_label(const UniqueQuery& q) { return "unique:" + q.element; }

std::string describe(const Action& a) {
  const std::string step = a.step.str();
  switch (a.kind) {
    case Action::Kind::fresh: return step + " fresh " + a.symbol;
    case Action::Kind::compute: return step + " compute " + a.symbol + " = " + a.expr.str();
    case Action::Kind::check_equal: return step + " check " + a.symbol + " == " + a.expr.str();
    case Action::Kind::send:
      return step + " send to " + a.peer + " over " + std::string(to_string(*a.channel)) + ": " + join_terms(a.parts);
    case Action::Kind::receive: {
      std::string s = step + " receive from " + a.peer + " over " + std::string(to_string(*a.channel)) + ": ";
      for (std::size_t i = 0; i < a.patterns.size(); ++i) s += (i ? ", " : "") + describe(a.patterns[i]);
      return s;
    }
    case Action::Kind::begin: return step + " begin " + a.label + "(" + join_terms(a.args) + ")";
    case Action::Kind::end: return step + " end " + a.label + "(" + join_terms(a.args) + ")";
  }
  return step;
}

ProtocolModel compile(const ProtocolSpec& spec) { return Compiler(spec).run(); }

SearchBudgetExceeded::SearchBudgetExceeded(std::size_t ceiling, SearchStatistics partial)
    : std::runtime_error("search exceeded " + std::to_string(ceiling) + " states"), partial_(partial) {}

ReplayDivergence::ReplayDivergence(std::size_t index, const std::string& why)
    : std::runtime_error("replay diverges at event " + std::to_string(index) + ": " + why), index_(index) {}

namespace detail {

Runtime::Runtime(const ProtocolModel& model, const AttackerModel& attacker) : model_(model), attacker_(attacker) {}

std::string Runtime::label(const Instance& i) const { return process(i).principal + "." + std::to_string(i.session); }

const Action* Runtime::current(const Instance& i) const {
  const auto& acts = process(i).actions;
  if (i.aborted || i.pc >= acts.size()) return nullptr;
  return &acts[i.pc];
}

std::optional<Term> Runtime::eval(const Term& expr, const Instance& i) const {
  switch (expr.kind()) {
    case TermKind::atom: {
      if (auto it = i.env.find(expr.name()); it != i.env.end()) return it->second;
      auto sym = model_.symbols.find(expr.name());
      if (sym == model_.symbols.end() || sym->second.kind != Symbol::Kind::global_atom) return std::nullopt;
      return Term::atom(expr.name(), sym->second.sort);
    }
    case TermKind::var: return std::nullopt;
    case TermKind::hash: {
      auto m = eval(expr.arg(0), i);
      if (!m) return std::nullopt;
      return Term::hash(*m);
    }
    default: {
      auto l = eval(expr.arg(0), i);
      auto r = eval(expr.arg(1), i);
      if (!l || !r) return std::nullopt;
      switch (expr.kind()) {
        case TermKind::pair: return Term::pair(*l, *r);
        case TermKind::senc: return Term::senc(*l, *r);
        case TermKind::mac: return Term::mac(*l, *r);
        default: return Term::xor_mask(*l, *r);
      }
    }
  }
}

bool Runtime::match(const Pattern& p, const Term& v, Instance& i) const {
  switch (p.kind) {
    case Pattern::Kind::bind: {
      auto [it, fresh] = i.env.try_emplace(p.symbol, v);
      if (!fresh && it->second != v) return false;
      break;
    }
    case Pattern::Kind::known: {
      auto e = eval(p.expr, i);
      if (!e || *e != v) return false;
      break;
    }
    case Pattern::Kind::pair:
      if (v.kind() != TermKind::pair || !match(p.parts[0], v.arg(0), i) || !match(p.parts[1], v.arg(1), i))
        return false;
      break;
    case Pattern::Kind::decrypt: {
      if (v.kind() != p.cipher) return false;
      auto key = eval(p.expr, i);
      if (!key || *key != v.arg(1) || !match(p.parts[0], v.arg(0), i)) return false;
      break;
    }
  }
  if (!p.alias.empty()) {
    auto [it, fresh] = i.env.try_emplace(p.alias, v);
    if (!fresh && it->second != v) return false;
  }
  return true;
}

Term Runtime::fresh_value(const std::string& symbol, const Instance& i) const {
  return Term::atom(symbol + "@" + label(i), model_.symbols.at(symbol).sort);
}

bool Runtime::run_local(Instance& i) const {
  while (const Action* a = current(i)) {
    switch (a->kind) {
      case Action::Kind::fresh: i.env.insert_or_assign(a->symbol, fresh_value(a->symbol, i)); break;
      case Action::Kind::compute: {
        auto v = eval(a->expr, i);
        if (!v) throw std::logic_error(label(i) + ": cannot evaluate " + a->expr.str());
        i.env.insert_or_assign(a->symbol, *v);
        break;
      }
      case Action::Kind::check_equal: {
        auto want = eval(Term::atom(a->symbol, Sort::data), i);
        auto got = eval(a->expr, i);
        if (!want || !got || *want != *got) {
          i.aborted = true;
          return false;
        }
        break;
      }
      default: return true;
    }
    ++i.pc;
  }
  return !i.aborted;
}

bool Runtime::observable(ChannelClass channel, const std::string& element) const {
  auto caps = attacker_.effective_for(channel, element);
  switch (channel) {
    case ChannelClass::insecure:
    case ChannelClass::authenticated:
      return has_cap(caps, Capability::eavesdrop_wired) || has_cap(caps, Capability::eavesdrop_wireless);
    case ChannelClass::confidential_authenticated: return false;
    case ChannelClass::out_of_band_keypad: return has_cap(caps, Capability::observe_keypad_input);
  }
  return false;
}

bool Runtime::injectable(ChannelClass channel, const std::vector<std::string>& elements) const {
  if (channel != ChannelClass::insecure) return false;
  return std::all_of(elements.begin(), elements.end(), [&](const std::string& e) {
    return has_cap(attacker_.effective_for(channel, e), Capability::inject_messages);
  });
}

Term Runtime::attacker_atom(int n) { return Term::atom("atk" + std::to_string(n), Sort::nonce); }

std::vector<Term> Runtime::initial_knowledge(int fresh_budget) const {
  std::set<Term> out;
  for (const Term& t : model_.public_terms) out.insert(t);
  for (const std::string& p : model_.principals) out.insert(Term::atom(p, Sort::agent));
  for (const std::string& d : attacker_.directory()) {
    auto it = model_.symbols.find(d);
    if (it != model_.symbols.end() && it->second.kind == Symbol::Kind::global_atom)
      out.insert(Term::atom(d, it->second.sort));
  }
  for (int n = 1; n <= fresh_budget; ++n) out.insert(attacker_atom(n));
  return {out.begin(), out.end()};
}

std::vector<Term> Runtime::secrecy_values(const SecrecyQuery& q, const std::vector<Instance>& instances) const {
  std::string owner;
  for (const Term& a : atoms_of(q.target)) {
    auto it = model_.symbols.find(a.name());
    if (it != model_.symbols.end() && it->second.kind != Symbol::Kind::global_atom) {
      owner = it->second.owner;
      break;
    }
  }
  if (owner.empty()) return {q.target};
  std::vector<Term> out;
  for (const Instance& i : instances) {
    if (process(i).principal != owner) continue;
    if (auto v = eval(q.target, i); v && std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  }
  return out;
}

std::optional<std::vector<Term>> Runtime::split(const Term& message, std::size_t n) {
  std::vector<Term> out;
  Term rest = message;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (rest.kind() != TermKind::pair) return std::nullopt;
    out.push_back(rest.arg(0));
    rest = rest.arg(1);
  }
  out.push_back(rest);
  return out;
}

}  // namespace detail

}  // namespace protoscope
