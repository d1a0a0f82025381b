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

#include <map>

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

class Replayer {
 public:
  Replayer(const AttackTrace& trace, const ProtocolModel& model, const AttackerModel& attacker, std::size_t depth)
      : trace_(trace), rt_(model, attacker) {
    for (std::size_t p = 0; p < model.processes.size(); ++p)
      for (int s = 1; s <= trace.sessions_per_role; ++s) {
        Instance i{p, s, 0, false, {}};
        by_label_[rt_.label(i)] = inst_.size();
        inst_.push_back(i);
      }
    auto init = rt_.initial_knowledge(trace.attacker_fresh_budget);
    kb_ = close(std::set<Term>(init.begin(), init.end()), standard_rules(), depth);
    if (auto* a = std::get_if<AuthQuery>(&trace.violated)) target_label_ = auth_label(*a);
    if (auto* u = std::get_if<UniqueQuery>(&trace.violated)) target_label_ = unique_label(*u);
  }

  bool run() {
    for (index_ = 0; index_ < trace_.events.size(); ++index_) {
      const TraceEvent& ev = trace_.events[index_];
      if (injected_ && !std::holds_alternative<HonestReceive>(ev)) fail("injected message is never received");
      std::visit([&](const auto& e) { step(e); }, ev);
    }
    if (injected_) fail("injected message is never received");
    for (Instance& i : inst_) rt_.run_local(i);
    if (auto* s = std::get_if<SecrecyQuery>(&trace_.violated))
      for (const Term& v : rt_.secrecy_values(*s, inst_))
        if (kb_.contains(v)) violated_ = true;
    if (!violated_) throw ReplayDivergence(trace_.events.size(), "the trace does not violate " + describe(trace_.violated));
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw ReplayDivergence(index_, why); }
  // Problems with an injected message belong to the inject event.
  [[noreturn]] void fail_inject(const std::string& why) const { throw ReplayDivergence(inject_at_, why); }

  Instance& instance(const std::string& label) {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) fail("unknown session " + label);
    return inst_[it->second];
  }

  // Runs local actions and returns the next visible action of `i`.
  const Action& next_action(Instance& i, Action::Kind want) {
    if (!rt_.run_local(i)) fail(rt_.label(i) + " fails a check");
    const Action* a = rt_.current(i);
    if (!a) fail(rt_.label(i) + " has finished");
    if (a->kind != want) fail(rt_.label(i) + " is at '" + describe(*a) + "'");
    return *a;
  }

  std::vector<Term> eval_all(const std::vector<Term>& exprs, const Instance& i) {
    std::vector<Term> out;
    for (const Term& e : exprs) {
      auto v = rt_.eval(e, i);
      if (!v) fail(rt_.label(i) + " cannot evaluate " + e.str());
      out.push_back(*v);
    }
    return out;
  }

  void step(const HonestSend& e) {
    Instance& i = instance(e.session);
    const Action& a = next_action(i, Action::Kind::send);
    if (a.step != e.step || *a.channel != e.channel) fail(e.session + " sends step " + a.step.str() + " instead");
    auto parts = eval_all(a.parts, i);
    if (Term::tuple(parts) != e.term) fail(e.session + " sends a different message");
    pending_.push_back(Message{a.step, a.peer, e.term});
    std::vector<Term> seen;
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (rt_.observable(*a.channel, a.elements[k])) seen.push_back(parts[k]);
    if (!seen.empty()) kb_ = kb_.extend(seen);
    ++i.pc;
  }

  void step(const HonestReceive& e) {
    Instance& i = instance(e.session);
    const Action& a = next_action(i, Action::Kind::receive);
    if (a.step != e.step) fail(e.session + " waits for step " + a.step.str());
    auto parts = Runtime::split(e.term, a.patterns.size());
    if (!parts) fail("message has the wrong number of elements");
    if (injected_) {
      if (injected_->term != e.term) fail("received message differs from the injected one");
      if (injected_->channel != *a.channel || !rt_.injectable(*a.channel, a.elements))
        fail_inject("the attacker cannot inject on this channel");
      for (const Term& p : *parts)
        if (!kb_.contains(p)) fail_inject("injected element " + p.str() + " is not derivable");
      injected_.reset();
    } else {
      auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Message& m) {
        return m.step == a.step && m.to == rt_.process(i).principal && m.term == e.term;
      });
      if (it == pending_.end()) fail("no such message was sent to " + e.session);
      pending_.erase(it);
    }
    Instance copy = i;
    for (std::size_t k = 0; k < parts->size(); ++k)
      if (!rt_.match(a.patterns[k], (*parts)[k], copy)) fail(e.session + " rejects the message");
    ++copy.pc;
    i = std::move(copy);
  }

  void step(const AttackerLearn& e) {
    if (!kb_.contains(e.term)) fail("attacker cannot derive " + e.term.str());
  }

  void step(const AttackerInject& e) {
    injected_ = e;
    inject_at_ = index_;
  }

  void step(const BeginEvent& e) {
    Instance& i = instance(e.session);
    const Action& a = next_action(i, Action::Kind::begin);
    if (a.label != e.label || eval_all(a.args, i) != e.args) fail(e.session + " raises a different begin event");
    begins_.insert({e.label, e.args});
    ++i.pc;
  }

  void step(const EndEvent& e) {
    Instance& i = instance(e.session);
    const Action& a = next_action(i, Action::Kind::end);
    if (a.label != e.label || eval_all(a.args, i) != e.args) fail(e.session + " raises a different end event");
    Event ev{e.label, e.args};
    bool bad = e.label.rfind("auth:", 0) == 0 ? !begins_.count(ev) : !accepts_.insert(ev).second;
    if (bad && e.label == target_label_) violated_ = true;
    ++i.pc;
  }

  const AttackTrace& trace_;
  Runtime rt_;
  std::vector<Instance> inst_;
  std::map<std::string, std::size_t> by_label_;
  KnowledgeSet kb_;
  std::vector<Message> pending_;
  std::set<Event> begins_, accepts_;
  std::optional<AttackerInject> injected_;
  std::string target_label_;
  bool violated_ = false;
  std::size_t index_ = 0;
  std::size_t inject_at_ = 0;
};

}  // namespace

bool replay(const AttackTrace& trace, const ProtocolModel& model, const AttackerModel& attacker,
            std::optional<std::size_t> depth_bound) {
  return Replayer(trace, model, attacker, depth_bound.value_or(model.default_depth_bound)).run();
}

}  // namespace protoscope
