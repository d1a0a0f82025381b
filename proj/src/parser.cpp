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

#include "protoscope/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace protoscope {

namespace {

enum class Tok { ident, number, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourcePos pos;
};

std::vector<Token> lex_line(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto at = [&](std::size_t p) { return SourcePos{lineno, static_cast<int>(p) + 1}; };
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      out.push_back({Tok::ident, std::string(line.substr(i, j - i)), at(i)});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back({Tok::number, std::string(line.substr(i, j - i)), at(i)});
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string text;
      while (j < line.size() && line[j] != '"') {
        if (line[j] == '\\' && j + 1 < line.size()) ++j;
        text += line[j++];
      }
      if (j >= line.size()) throw SyntaxError(at(i), "closing '\"'");
      out.push_back({Tok::string, text, at(i)});
      i = j + 1;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Tok::punct, "->", at(i)});
      i += 2;
    } else if (std::string_view("(),:=+-.[]").find(c) != std::string_view::npos) {
      out.push_back({Tok::punct, std::string(1, c), at(i)});
      ++i;
    } else {
      throw SyntaxError(at(i), "a token, found '" + std::string(1, c) + "'");
    }
  }
  out.push_back({Tok::end, "", at(line.size())});
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is(std::string_view punct_or_word) const { return peek().text == punct_or_word && peek().kind != Tok::string; }
  bool accept(std::string_view s) {
    if (!is(s)) return false;
    next();
    return true;
  }
  Token expect(std::string_view s) {
    if (!is(s)) throw SyntaxError(peek().pos, "'" + std::string(s) + "'");
    return next();
  }
  Token ident(const std::string& what) {
    if (peek().kind != Tok::ident) throw SyntaxError(peek().pos, what);
    return next();
  }
  int number(const std::string& what) {
    if (peek().kind != Tok::number) throw SyntaxError(peek().pos, what);
    return std::stoi(next().text);
  }
  void finish() {
    if (!at_end()) throw SyntaxError(peek().pos, "end of line");
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

struct RawExpr {
  std::string head;
  std::vector<RawExpr> args;
  bool call = false;
  SourcePos pos;
};

struct RawAtom {
  std::string name;
  std::optional<Sort> sort;
  SourcePos pos;
};

struct RawElement {
  std::string name;
  RawExpr expr;
  std::string provenance;
  SourcePos pos;
};

struct RawStep {
  StepId id;
  bool compute = false;
  std::vector<RawAtom> fresh;
  std::string sender;
  std::optional<std::string> receiver;
  std::optional<ChannelClass> channel;
  std::vector<RawElement> elements;
  SourcePos pos, sender_pos, receiver_pos;
};

struct RawRequire {
  StepId step;
  std::string element;
  std::vector<TrustProperty> properties;
  SourcePos pos;
};

struct RawQuery {
  std::string kind;
  RawExpr target;
  std::string claimant, peer, element;
  SourcePos pos;
};

struct RawPrincipal {
  std::string id;
  bool trusted = false;
  std::vector<RawExpr> knows;
  std::vector<RawAtom> annotations;
  SourcePos pos;
};

struct RawSpec {
  std::optional<std::string> name;
  std::vector<std::string> goals;
  std::vector<RawPrincipal> principals;
  std::vector<RawExpr> publics;
  std::vector<RawAtom> public_annotations;
  bool attacker = false;
  std::vector<std::pair<CapabilityDelta, SourcePos>> deltas;
  std::vector<RawStep> steps;
  std::vector<RawRequire> requires_;
  std::vector<RawQuery> queries;
};

const std::set<std::string> kConstructors = {"pair", "senc", "mac", "hash", "xor"};

RawExpr parse_expr(Cursor& c) {
  Token t = c.ident("a term");
  RawExpr e{t.text, {}, false, t.pos};
  if (c.is("(")) {
    if (!kConstructors.count(t.text)) throw SyntaxError(t.pos, "one of pair, senc, mac, hash, xor");
    c.next();
    e.call = true;
    e.args.push_back(parse_expr(c));
    while (c.accept(",")) e.args.push_back(parse_expr(c));
    c.expect(")");
    std::size_t want = t.text == "hash" ? 1 : 2;
    // pair(a,b,c) is sugar for pair(a,pair(b,c)).
    if (t.text == "pair" && e.args.size() > 2) {
      RawExpr tail = e.args.back();
      for (std::size_t i = e.args.size() - 1; i-- > 1;) tail = RawExpr{"pair", {e.args[i], tail}, true, e.args[i].pos};
      e.args = {e.args[0], tail};
    }
    if (e.args.size() != want) throw SyntaxError(t.pos, std::to_string(want) + " argument(s) to " + t.text);
  } else if (kConstructors.count(t.text)) {
    throw SyntaxError(c.peek().pos, "'(' after " + t.text);
  }
  return e;
}

// name[:sort]
RawAtom parse_decl(Cursor& c, const std::string& what) {
  Token t = c.ident(what);
  RawAtom a{t.text, std::nullopt, t.pos};
  if (c.is(":") && c.peek(1).kind == Tok::ident && parse_sort(c.peek(1).text)) {
    c.next();
    a.sort = parse_sort(c.next().text);
  }
  return a;
}

StepId parse_step_id(Cursor& c) {
  StepId id;
  id.major = c.number("a step number");
  if (c.is(".") && c.peek(1).kind == Tok::number) {
    c.next();
    id.minor = c.number("a sub-step number");
  }
  return id;
}

CapabilityDelta parse_delta_tokens(Cursor& c, SourcePos& pos) {
  CapabilityDelta d;
  pos = c.peek().pos;
  if (c.accept("+")) d.sign = CapabilityDelta::Sign::plus;
  else if (c.accept("-")) d.sign = CapabilityDelta::Sign::minus;
  else throw SyntaxError(c.peek().pos, "'+' or '-'");
  Token name = c.ident("a capability name");
  auto cap = parse_capability(name.text);
  if (!cap) throw UnknownCapability(name.pos, name.text);
  d.capability = *cap;
  if (c.accept("(")) {
    d.directory.push_back(c.ident("an element name").text);
    while (c.accept(",")) d.directory.push_back(c.ident("an element name").text);
    c.expect(")");
  }
  if (c.accept("on")) d.scope = c.ident("a channel or element").text;
  return d;
}

RawSpec parse_raw(std::string_view source) {
  RawSpec raw;
  std::istringstream in{std::string(source)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Cursor c(lex_line(line, lineno));
    if (c.at_end()) continue;
    Token kw = c.ident("a declaration keyword");
    if (!raw.name && kw.text != "protocol") throw SyntaxError(kw.pos, "'protocol <name>' as the first declaration");
    if (kw.text == "protocol") {
      if (raw.name) throw InvalidSpec("line " + std::to_string(lineno) + ": duplicate protocol line", kw.pos);
      raw.name = c.ident("a protocol name").text;
    } else if (kw.text == "goal") {
      if (c.peek().kind != Tok::string) throw SyntaxError(c.peek().pos, "a quoted goal");
      raw.goals.push_back(c.next().text);
    } else if (kw.text == "principal") {
      RawPrincipal p;
      Token id = c.ident("a principal id");
      p.id = id.text;
      p.pos = id.pos;
      p.trusted = c.accept("trusted");
      if (c.accept("knows")) {
        auto item = [&] {
          if (c.peek().kind == Tok::ident && !c.is(")") && c.peek(1).text == ":") {
            RawAtom a = parse_decl(c, "a term");
            p.annotations.push_back(a);
            p.knows.push_back(RawExpr{a.name, {}, false, a.pos});
          } else {
            p.knows.push_back(parse_expr(c));
          }
        };
        item();
        while (c.accept(",")) item();
      }
      raw.principals.push_back(std::move(p));
    } else if (kw.text == "public") {
      auto item = [&] {
        if (c.peek(1).text == ":") {
          RawAtom a = parse_decl(c, "a term");
          raw.public_annotations.push_back(a);
          raw.publics.push_back(RawExpr{a.name, {}, false, a.pos});
        } else {
          raw.publics.push_back(parse_expr(c));
        }
      };
      item();
      while (c.accept(",")) item();
    } else if (kw.text == "attacker") {
      Token m = c.ident("an attacker model");
      if (m.text != "dolev_yao") throw SyntaxError(m.pos, "'dolev_yao'");
      raw.attacker = true;
    } else if (kw.text == "capability") {
      SourcePos pos;
      CapabilityDelta d = parse_delta_tokens(c, pos);
      raw.deltas.emplace_back(std::move(d), pos);
    } else if (kw.text == "step") {
      RawStep s;
      s.pos = kw.pos;
      s.id = parse_step_id(c);
      if (c.accept("fresh")) {
        s.fresh.push_back(parse_decl(c, "a fresh atom"));
        while (c.accept(",")) s.fresh.push_back(parse_decl(c, "a fresh atom"));
      }
      if (c.accept("compute")) {
        s.compute = true;
        Token p = c.ident("a principal id");
        s.sender = p.text;
        s.sender_pos = p.pos;
      } else {
        Token snd = c.ident("a sender principal");
        s.sender = snd.text;
        s.sender_pos = snd.pos;
        c.expect("->");
        Token rcv = c.ident("a receiver principal");
        s.receiver = rcv.text;
        s.receiver_pos = rcv.pos;
        c.expect("over");
        Token ch = c.ident("a channel class");
        s.channel = parse_channel(ch.text);
        if (!s.channel)
          throw SyntaxError(ch.pos, "one of insecure, authenticated, confidential_authenticated, out_of_band_keypad");
      }
      c.expect(":");
      do {
        RawElement e;
        Token n = c.ident("an element name");
        e.name = n.text;
        e.pos = n.pos;
        if (c.accept("=")) e.expr = parse_expr(c);
        else e.expr = RawExpr{n.text, {}, false, n.pos};
        if (c.accept("[")) {
          e.provenance = c.ident("a provenance tag").text;
          c.expect("]");
        }
        s.elements.push_back(std::move(e));
      } while (c.accept(","));
      raw.steps.push_back(std::move(s));
    } else if (kw.text == "require") {
      RawRequire r;
      r.pos = kw.pos;
      c.expect("step");
      r.step = parse_step_id(c);
      r.element = c.ident("an element name").text;
      c.expect(":");
      do {
        Token p = c.ident("a trust property");
        auto prop = parse_property(p.text);
        if (!prop) throw SyntaxError(p.pos, "one of none, authenticity, confidentiality, integrity, uniqueness");
        if (std::find(r.properties.begin(), r.properties.end(), *prop) == r.properties.end())
          r.properties.push_back(*prop);
      } while (c.accept(","));
      raw.requires_.push_back(std::move(r));
    } else if (kw.text == "query") {
      RawQuery q;
      q.pos = kw.pos;
      Token k = c.ident("secrecy, auth or unique");
      q.kind = k.text;
      if (k.text == "secrecy") {
        q.target = parse_expr(c);
      } else if (k.text == "auth") {
        q.claimant = c.ident("a claimant principal").text;
        q.peer = c.ident("a peer principal").text;
        c.expect("on");
        q.element = c.ident("an element name").text;
      } else if (k.text == "unique") {
        q.element = c.ident("an element name").text;
      } else {
        throw SyntaxError(k.pos, "secrecy, auth or unique");
      }
      raw.queries.push_back(std::move(q));
    } else {
      throw SyntaxError(kw.pos, "one of protocol, goal, principal, public, attacker, capability, step, require, query");
    }
    c.finish();
  }
  if (!raw.name) throw SyntaxError({lineno + 1, 1}, "'protocol <name>'");
  return raw;
}

void walk(const RawExpr& e, const std::function<void(const RawExpr&)>& fn) {
  fn(e);
  for (const RawExpr& a : e.args) walk(a, fn);
}

class Resolver {
 public:
  explicit Resolver(RawSpec raw) : raw_(std::move(raw)) {}

  ProtocolSpec run() {
    spec_.name = *raw_.name;
    spec_.goals = raw_.goals;
    declare_atoms();
    check_numbering();
    resolve_steps();
    resolve_requires();
    resolve_queries();
    resolve_attacker();
    return std::move(spec_);
  }

 private:
  struct AtomDecl {
    Sort sort = Sort::data;
    bool explicit_sort = false;
    bool fresh = false;
    std::string owner;
    StepId step;
  };

  void declare(const std::string& name, std::optional<Sort> sort, Sort fallback, bool fresh, const std::string& owner,
               StepId step, SourcePos pos) {
    auto [it, inserted] = atoms_.try_emplace(name);
    AtomDecl& d = it->second;
    if (inserted) {
      d.sort = sort.value_or(fallback);
      d.explicit_sort = sort.has_value();
      d.fresh = fresh;
      d.owner = owner;
      d.step = step;
      return;
    }
    if (fresh || d.fresh)
      throw InvalidSpec("line " + std::to_string(pos.line) + ": atom '" + name + "' is declared more than once",
                        pos);
    if (sort) {
      if (d.explicit_sort && d.sort != *sort)
        throw InvalidSpec("line " + std::to_string(pos.line) + ": conflicting sorts for '" + name + "'", pos);
      d.sort = *sort;
      d.explicit_sort = true;
    }
  }

  void declare_atoms() {
    if (raw_.principals.empty()) throw InvalidSpec("a protocol needs at least one principal", {1, 1});
    for (const RawPrincipal& p : raw_.principals) {
      if (principal_ids_.count(p.id))
        throw InvalidSpec("line " + std::to_string(p.pos.line) + ": duplicate principal '" + p.id + "'", p.pos);
      principal_ids_.insert(p.id);
      declare(p.id, Sort::agent, Sort::agent, false, "", {}, p.pos);
    }
    for (const RawPrincipal& p : raw_.principals) {
      for (const RawAtom& a : p.annotations) declare(a.name, a.sort, Sort::data, false, "", {}, a.pos);
      for (const RawExpr& e : p.knows) declare_leaves(e, Sort::data);
    }
    for (const RawAtom& a : raw_.public_annotations) declare(a.name, a.sort, Sort::constant, false, "", {}, a.pos);
    for (const RawExpr& e : raw_.publics) declare_leaves(e, Sort::constant);
    for (const RawStep& s : raw_.steps)
      for (const RawAtom& a : s.fresh) declare(a.name, a.sort, Sort::nonce, true, s.sender, s.id, a.pos);

    // Atoms used as keys take the key sort unless annotated otherwise.
    auto infer = [&](const RawExpr& root) {
      walk(root, [&](const RawExpr& e) {
        if (!e.call || e.args.size() != 2 || e.head == "pair") return;
        const RawExpr& k = e.args[1];
        if (k.call) return;
        auto it = atoms_.find(k.head);
        if (it != atoms_.end() && !it->second.explicit_sort && !principal_ids_.count(k.head))
          it->second.sort = Sort::key;
      });
    };
    for (const RawPrincipal& p : raw_.principals)
      for (const RawExpr& e : p.knows) infer(e);
    for (const RawStep& s : raw_.steps)
      for (const RawElement& e : s.elements) infer(e.expr);

    for (const auto& [name, d] : atoms_) {
      Symbol sym;
      sym.kind = d.fresh ? Symbol::Kind::fresh_atom : Symbol::Kind::global_atom;
      sym.sort = d.sort;
      sym.owner = d.owner;
      sym.defined_at = d.step;
      spec_.symbols[name] = sym;
    }
  }

  void declare_leaves(const RawExpr& root, Sort fallback) {
    walk(root, [&](const RawExpr& e) {
      if (!e.call) declare(e.head, std::nullopt, fallback, false, "", {}, e.pos);
    });
  }

  Term to_term(const RawExpr& e, const std::function<void(const RawExpr&)>& on_unknown) const {
    if (!e.call) {
      auto it = spec_.symbols.find(e.head);
      if (it == spec_.symbols.end()) {
        on_unknown(e);
        return Term::atom(e.head, Sort::data);
      }
      return Term::atom(e.head, it->second.kind == Symbol::Kind::element ? Sort::data : it->second.sort);
    }
    std::vector<Term> a;
    for (const RawExpr& x : e.args) a.push_back(to_term(x, on_unknown));
    if (e.head == "pair") return Term::pair(a[0], a[1]);
    if (e.head == "senc") return Term::senc(a[0], a[1]);
    if (e.head == "mac") return Term::mac(a[0], a[1]);
    if (e.head == "hash") return Term::hash(a[0]);
    return Term::xor_mask(a[0], a[1]);
  }

  void check_numbering() {
    for (std::size_t i = 0; i < raw_.steps.size(); ++i) {
      const StepId id = raw_.steps[i].id;
      const StepId prev = i == 0 ? StepId{0, 0} : raw_.steps[i - 1].id;
      bool ok = (id.major == prev.major + 1 && id.minor <= 1) ||
                (prev.minor > 0 && id == StepId{prev.major, prev.minor + 1});
      if (!ok)
        throw InvalidSpec("line " + std::to_string(raw_.steps[i].pos.line) + ": step " + id.str() +
                              " breaks dense increasing numbering",
                          raw_.steps[i].pos);
    }
  }

  std::set<std::string>& known(const std::string& principal) { return known_[principal]; }

  static void learn(const Term& t, std::set<std::string>& k) {
    switch (t.kind()) {
      case TermKind::atom: k.insert(t.name()); break;
      case TermKind::pair:
        learn(t.arg(0), k);
        learn(t.arg(1), k);
        break;
      case TermKind::senc:
      case TermKind::xor_mask: {
        auto key_atoms = atoms_of(t.arg(1));
        if (std::all_of(key_atoms.begin(), key_atoms.end(), [&](const Term& a) { return k.count(a.name()); }))
          learn(t.arg(0), k);
        break;
      }
      default: break;
    }
  }

  void resolve_steps() {
    for (const RawPrincipal& rp : raw_.principals) {
      Principal p{rp.id, rp.trusted, {}};
      auto& k = known(rp.id);
      for (const std::string& id : principal_ids_) k.insert(id);
      for (const RawExpr& e : rp.knows) {
        Term t = to_term(e, [](const RawExpr&) {});
        p.initial_knowledge.push_back(t);
        for (const Term& a : atoms_of(t)) k.insert(a.name());
      }
      spec_.principals.push_back(std::move(p));
    }
    for (const RawExpr& e : raw_.publics) spec_.public_terms.push_back(to_term(e, [](const RawExpr&) {}));
    for (const RawPrincipal& rp : raw_.principals)
      for (const Term& t : spec_.public_terms)
        for (const Term& a : atoms_of(t)) known(rp.id).insert(a.name());

    for (const RawStep& rs : raw_.steps) {
      StepSpec s;
      s.id = rs.id;
      s.pos = rs.pos;
      s.sender = rs.sender;
      s.receiver = rs.receiver;
      s.channel = rs.channel;
      s.kind = rs.compute ? StepKind::compute
               : rs.channel == ChannelClass::out_of_band_keypad ? StepKind::out_of_band
                                                                 : StepKind::send;
      if (!principal_ids_.count(rs.sender))
        throw DanglingReference(rs.sender_pos, rs.sender, "step " + rs.id.str() + " names an undeclared principal");
      if (rs.receiver && !principal_ids_.count(*rs.receiver))
        throw DanglingReference(rs.receiver_pos, *rs.receiver,
                                "step " + rs.id.str() + " names an undeclared principal");
      auto& sk = known(rs.sender);
      for (const RawAtom& a : rs.fresh) {
        s.fresh.push_back(a.name);
        sk.insert(a.name);
      }
      std::set<std::string> seen;
      for (const RawElement& re : rs.elements) {
        if (!seen.insert(re.name).second)
          throw InvalidSpec("line " + std::to_string(re.pos.line) + ": element '" + re.name +
                                "' appears twice in step " + rs.id.str(),
                            re.pos);
        bool defines = !spec_.symbols.count(re.name);
        Term expr = to_term(re.expr, [&](const RawExpr& u) {
          throw CausalityError(u.pos, rs.id, re.name, "'" + u.head + "' is not declared before use");
        });
        for (const Term& a : atoms_of(expr))
          if (!sk.count(a.name()))
            throw CausalityError(re.pos, rs.id, re.name,
                                 rs.sender + " does not know '" + a.name() + "' at this step");
        if (auto it = spec_.symbols.find(re.name); it != spec_.symbols.end() &&
                                                   it->second.kind != Symbol::Kind::element &&
                                                   !(expr.is_atom() && expr.name() == re.name))
          throw InvalidSpec("line " + std::to_string(re.pos.line) + ": element '" + re.name +
                                "' shares its name with an atom but is bound to " + expr.str(),
                            re.pos);
        if (defines) {
          Symbol sym;
          sym.kind = Symbol::Kind::element;
          sym.sort = Sort::data;
          sym.owner = rs.sender;
          sym.defined_at = rs.id;
          sym.definition = expr;
          spec_.symbols[re.name] = sym;
        }
        sk.insert(re.name);
        if (rs.receiver) {
          auto& rk = known(*rs.receiver);
          learn(expr, rk);
          rk.insert(re.name);
        }
        s.elements.push_back(Element{re.name, expr, re.provenance, re.pos});
      }
      spec_.steps.push_back(std::move(s));
    }
  }

  void resolve_requires() {
    for (const RawRequire& r : raw_.requires_) {
      auto it = std::find_if(spec_.steps.begin(), spec_.steps.end(), [&](const StepSpec& s) { return s.id == r.step; });
      if (it == spec_.steps.end())
        throw DanglingReference(r.pos, "step " + r.step.str(), "requirement names a missing step");
      if (!it->element(r.element))
        throw DanglingReference(r.pos, r.element, "not an element of step " + r.step.str());
      auto req = std::find_if(it->requirements.begin(), it->requirements.end(),
                              [&](const Requirement& q) { return q.element == r.element; });
      if (req == it->requirements.end()) {
        it->requirements.push_back({r.element, r.properties});
      } else {
        for (TrustProperty p : r.properties)
          if (std::find(req->properties.begin(), req->properties.end(), p) == req->properties.end())
            req->properties.push_back(p);
      }
    }
  }

  bool element_occurs(const std::string& name) const {
    for (const StepSpec& s : spec_.steps)
      if (s.element(name)) return true;
    return false;
  }

  void resolve_queries() {
    for (const RawQuery& q : raw_.queries) {
      if (q.kind == "secrecy") {
        Term t = to_term(q.target, [&](const RawExpr& u) {
          throw DanglingReference(u.pos, u.head, "secrecy target names an undeclared symbol");
        });
        spec_.queries.push_back(SecrecyQuery{t});
      } else if (q.kind == "auth") {
        for (const std::string& p : {q.claimant, q.peer})
          if (!principal_ids_.count(p)) throw DanglingReference(q.pos, p, "query names an undeclared principal");
        if (!element_occurs(q.element))
          throw DanglingReference(q.pos, q.element, "query names an element no step carries");
        spec_.queries.push_back(AuthQuery{q.claimant, q.peer, q.element});
      } else {
        if (!element_occurs(q.element))
          throw DanglingReference(q.pos, q.element, "query names an element no step carries");
        spec_.queries.push_back(UniqueQuery{q.element});
      }
    }
  }

  void resolve_attacker() {
    if (!raw_.attacker && !raw_.deltas.empty())
      throw InvalidSpec("capability deltas need an 'attacker dolev_yao' line", raw_.deltas.front().second);
    for (const auto& [d, pos] : raw_.deltas) {
      bool base = base_grants(d.capability);
      if (d.sign == CapabilityDelta::Sign::minus && !base)
        throw InvalidSpec("line " + std::to_string(pos.line) + ": '" + d.str() +
                              "' removes a capability the base model does not grant",
                          pos);
      if (d.sign == CapabilityDelta::Sign::plus && base)
        throw InvalidSpec("line " + std::to_string(pos.line) + ": '" + d.str() +
                              "' adds a capability the base model already grants",
                          pos);
      if (!d.directory.empty() && d.capability != Capability::know_public_directory)
        throw InvalidSpec("line " + std::to_string(pos.line) + ": only know_public_directory takes an element list",
                          pos);
      for (const std::string& e : d.directory)
        if (!spec_.symbols.count(e)) throw DanglingReference(pos, e, "directory names an undeclared element");
      spec_.attacker.deltas.push_back(d);
    }
  }

  RawSpec raw_;
  ProtocolSpec spec_;
  std::map<std::string, AtomDecl> atoms_;
  std::set<std::string> principal_ids_;
  std::map<std::string, std::set<std::string>> known_;
};

}  // namespace

ProtocolSpec parse(std::string_view source) { return Resolver(parse_raw(source)).run(); }

ProtocolSpec parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

CapabilityDelta parse_delta(std::string_view text) {
  Cursor c(lex_line(text, 1));
  SourcePos pos;
  CapabilityDelta d = parse_delta_tokens(c, pos);
  c.finish();
  return d;
}

void apply_override(AttackerModel& attacker, const CapabilityDelta& delta) {
  bool granted = attacker.grants(delta.capability);
  if (delta.sign == CapabilityDelta::Sign::minus && !granted)
    throw InvalidSpec("override '" + delta.str() + "' removes a capability not in force", {});
  if (delta.sign == CapabilityDelta::Sign::plus && granted)
    throw InvalidSpec("override '" + delta.str() + "' adds a capability already in force", {});
  attacker.deltas.push_back(delta);
}

}  // namespace protoscope
