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

#include "protoscope/term.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace protoscope {

struct Term::Node {
  TermKind kind;
  std::string name;
  Sort sort;
  std::vector<Term> args;
  std::size_t depth;
  std::size_t size;
  std::size_t hash;
  bool ground;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::agent: return "agent";
    case Sort::nonce: return "nonce";
    case Sort::key: return "key";
    case Sort::data: return "data";
    case Sort::constant: return "constant";
  }
  return "?";
}

std::optional<Sort> parse_sort(std::string_view s) {
  for (Sort v : {Sort::agent, Sort::nonce, Sort::key, Sort::data, Sort::constant})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::string_view to_string(TermKind k) {
  switch (k) {
    case TermKind::atom: return "atom";
    case TermKind::var: return "var";
    case TermKind::pair: return "pair";
    case TermKind::senc: return "senc";
    case TermKind::mac: return "mac";
    case TermKind::hash: return "hash";
    case TermKind::xor_mask: return "xor";
  }
  return "?";
}

Term Term::make(TermKind k, std::string name, Sort sort, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->name = std::move(name);
  n->sort = sort;
  n->args = std::move(args);
  n->depth = 1;
  n->size = 1;
  n->ground = k != TermKind::var;
  std::size_t h = mix(std::hash<int>{}(static_cast<int>(k)), std::hash<std::string>{}(n->name));
  if (k == TermKind::atom) h = mix(h, static_cast<std::size_t>(sort));
  for (const Term& a : n->args) {
    n->depth = std::max(n->depth, a.depth() + 1);
    n->size += a.size();
    n->ground = n->ground && a.ground();
    h = mix(h, a.hash_value());
  }
  n->hash = h;
  return Term(std::move(n));
}

Term Term::atom(std::string name, Sort sort) { return make(TermKind::atom, std::move(name), sort, {}); }
Term Term::var(std::string name) { return make(TermKind::var, std::move(name), Sort::data, {}); }
Term Term::pair(Term l, Term r) { return make(TermKind::pair, {}, Sort::data, {std::move(l), std::move(r)}); }
Term Term::senc(Term m, Term k) { return make(TermKind::senc, {}, Sort::data, {std::move(m), std::move(k)}); }
Term Term::mac(Term m, Term k) { return make(TermKind::mac, {}, Sort::data, {std::move(m), std::move(k)}); }
Term Term::hash(Term m) { return make(TermKind::hash, {}, Sort::data, {std::move(m)}); }
Term Term::xor_mask(Term m, Term k) {
  return make(TermKind::xor_mask, {}, Sort::data, {std::move(m), std::move(k)});
}

Term Term::tuple(const std::vector<Term>& parts) {
  if (parts.empty()) throw std::invalid_argument("Term::tuple: empty");
  Term acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = pair(*it, acc);
  return acc;
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
Sort Term::sort() const { return node_->sort; }
std::size_t Term::arity() const { return node_->args.size(); }
const Term& Term::arg(std::size_t i) const { return node_->args.at(i); }
std::size_t Term::depth() const { return node_->depth; }
std::size_t Term::size() const { return node_->size; }
std::size_t Term::hash_value() const { return node_->hash; }
bool Term::ground() const { return node_->ground; }

std::string Term::str() const {
  switch (kind()) {
    case TermKind::atom: return name();
    case TermKind::var: return "?" + name();
    default: break;
  }
  std::string out(to_string(kind()));
  out += '(';
  for (std::size_t i = 0; i < arity(); ++i) {
    if (i) out += ',';
    out += arg(i).str();
  }
  out += ')';
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash_value() != b.hash_value() || a.size() != b.size()) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (!a.is_compound()) {
    if (auto c = a.name() <=> b.name(); c != 0) return c;
    if (a.is_atom()) return a.sort() <=> b.sort();
    return std::strong_ordering::equal;
  }
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
  return std::strong_ordering::equal;
}

void subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  for (std::size_t i = 0; i < t.arity(); ++i) subterms(t.arg(i), out);
}

std::vector<Term> atoms_of(const Term& t) {
  std::vector<Term> all;
  subterms(t, all);
  std::vector<Term> out;
  for (const Term& s : all)
    if (s.is_atom() && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  return out;
}

}  // namespace protoscope
