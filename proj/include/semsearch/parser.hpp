#pragma once

// Lexer and recursive-descent parser for the analyzed language: modules,
// clauses, assertion directives and predicate queries.
//
// Accepted syntax (pure subset): facts, rules with ','/';'/'=' bodies, module
// and use_module directives, pred/true pred/trust pred assertions with
// optional '# "doc"' strings, prop and regtype declarations, '%' comments,
// signed decimal integers, lists and the infix operators '-' and '/'.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "semsearch/program.hpp"
#include "semsearch/sha256.hpp"
#include "semsearch/term.hpp"

namespace semsearch {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, int line, int column, std::string token)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + msg +
                           (token.empty() ? "" : " (at '" + token + "')")),
        line_(line), column_(column), token_(std::move(token)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

private:
  int line_;
  int column_;
  std::string token_;
};

namespace detail {

struct Token {
  enum class Kind { Atom, Var, Int, Str, Punct, End, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_layout();
      Token t = next();
      out.push_back(t);
      if (t.kind == Token::Kind::Eof) break;
    }
    return out;
  }

private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line_, col_, std::string());
  }

  char peek(std::size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_layout() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '%') {
        while (peek() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(Token::Kind k, std::string text, int line, int col) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = line;
    t.column = col;
    return t;
  }

  Token next() {
    int line = line_, col = col_;
    char c = peek();
    if (c == '\0') return make(Token::Kind::Eof, "", line, col);

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isdigit(static_cast<unsigned char>(peek()))) s.push_back(advance());
      return make(Token::Kind::Int, s, line, col);
    }

    if (std::islower(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
        s.push_back(advance());
      return make(Token::Kind::Atom, s, line, col);
    }

    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
        s.push_back(advance());
      return make(Token::Kind::Var, s, line, col);
    }

    if (c == '\'') {
      advance();
      std::string s;
      for (;;) {
        char d = peek();
        if (d == '\0' || d == '\n') fail("unterminated quoted atom");
        advance();
        if (d == '\\') {
          char e = peek();
          if (e == '\0') fail("unterminated escape in quoted atom");
          advance();
          s.push_back(e);
        } else if (d == '\'') {
          break;
        } else {
          s.push_back(d);
        }
      }
      return make(Token::Kind::Atom, s, line, col);
    }

    if (c == '"') {
      advance();
      std::string s;
      for (;;) {
        char d = peek();
        if (d == '\0') fail("unterminated string");
        advance();
        if (d == '\\') {
          char e = peek();
          if (e == '\0') fail("unterminated escape in string");
          advance();
          s.push_back(e == 'n' ? '\n' : e);
        } else if (d == '"') {
          break;
        } else {
          s.push_back(d);
        }
      }
      return make(Token::Kind::Str, s, line, col);
    }

    // End-of-clause '.': a period followed by layout or end of input.
    if (c == '.') {
      char n = peek(1);
      if (n == '\0' || n == ' ' || n == '\t' || n == '\r' || n == '\n' || n == '%') {
        advance();
        return make(Token::Kind::End, ".", line, col);
      }
      advance();
      return make(Token::Kind::Punct, ".", line, col);
    }

    if (c == ':' && peek(1) == '-') {
      advance();
      advance();
      return make(Token::Kind::Punct, ":-", line, col);
    }
    if (c == '=' && peek(1) == '>') {
      advance();
      advance();
      return make(Token::Kind::Punct, "=>", line, col);
    }

    static const std::string singles = "()[]{},|;=-/:#";
    if (singles.find(c) != std::string::npos) {
      advance();
      return make(Token::Kind::Punct, std::string(1, c), line, col);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

} // namespace detail

// ---------------------------------------------------------------------------

class Parser {
public:
  explicit Parser(const std::string& src) : src_(src) {
    toks_ = detail::Lexer(src).run();
    // Anonymous variables become fresh '_G<n>' names; start the counter past
    // any user variable that already uses that spelling.
    for (const auto& t : toks_)
      if (t.kind == detail::Token::Kind::Var && t.text.size() > 2 &&
          t.text.size() <= 11 && t.text[0] == '_' && t.text[1] == 'G') {
        bool digits = true;
        for (std::size_t i = 2; i < t.text.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
        if (digits) anon_ = std::max(anon_, 1 + std::stoul(t.text.substr(2)));
      }
  }

  Module parse_module(const std::string& default_name) {
    Module m;
    bool saw_module_decl = false;
    std::map<std::pair<std::string, std::size_t>, std::pair<bool, bool>> flags; // prop, regtype

    while (!at(detail::Token::Kind::Eof)) {
      if (at_punct(":-")) {
        next();
        parse_directive(m, saw_module_decl, default_name, flags);
      } else {
        if (!saw_module_decl) fail("expected ':- module(...)' before any clause");
        Clause c = parse_clause();
        add_clause(m, std::move(c));
      }
    }
    if (!saw_module_decl) fail("missing ':- module(...)' declaration");

    for (auto& [key, fl] : flags) {
      PredDef* p = m.find_pred(key.first, key.second);
      if (!p)
        fail("prop/regtype declaration for undefined predicate " + key.first + "/" +
             std::to_string(key.second));
      p->is_prop = fl.first || fl.second;
      p->is_regtype = fl.second;
    }
    for (const auto& e : m.exports) {
      if (!m.find_pred(e.first, e.second) && !m.has_trust(e.first, e.second))
        fail("exported predicate " + e.first + "/" + std::to_string(e.second) +
             " is neither defined nor covered by a trusted assertion");
    }
    for (auto& p : m.preds)
      p.exported = m.is_exported(p.name, p.arity);
    m.source_hash = sha256_hex(src_);
    return m;
  }

  // A single assertion directive, e.g. ':- pred p(A) : int(A).'.
  Assertion parse_single_assertion() {
    expect_punct(":-");
    AssertionKind k = parse_assertion_kind();
    Assertion a = parse_assertion_tail(k);
    if (!at(detail::Token::Kind::Eof)) fail("trailing input after assertion");
    return a;
  }

  // A goal conjunction, e.g. 'length(L,2), list(L)'.
  Body parse_goal() {
    TermPtr t = parse_term(1200);
    Body b = to_body(t);
    if (!at(detail::Token::Kind::Eof) && !at(detail::Token::Kind::End))
      fail("trailing input after goal");
    return b;
  }

  TermPtr parse_single_term() {
    TermPtr t = parse_term(1200);
    if (!at(detail::Token::Kind::Eof) && !at(detail::Token::Kind::End))
      fail("trailing input after term");
    return t;
  }

private:
  // ---- token plumbing ----

  const detail::Token& cur() const { return toks_[pos_]; }

  bool at(detail::Token::Kind k) const { return cur().kind == k; }

  bool at_punct(const std::string& s) const {
    return cur().kind == detail::Token::Kind::Punct && cur().text == s;
  }

  bool at_atom(const std::string& s) const {
    return cur().kind == detail::Token::Kind::Atom && cur().text == s;
  }

  const detail::Token& next() { return toks_[pos_++]; }

  void expect_punct(const std::string& s) {
    if (!at_punct(s)) fail("expected '" + s + "'");
    next();
  }

  void expect_end() {
    if (!at(detail::Token::Kind::End)) fail("expected '.'");
    next();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = cur();
    throw ParseError(msg, t.line, t.column, t.text);
  }

  SourceLoc loc() const { return {cur().line, cur().column}; }

  // ---- terms ----

  TermPtr fresh_anon() { return make_var("_G" + std::to_string(anon_++)); }

  TermPtr parse_primary() {
    const auto& t = cur();
    switch (t.kind) {
    case detail::Token::Kind::Int: {
      std::string s = next().text;
      return make_struct(s);
    }
    case detail::Token::Kind::Var: {
      std::string name = next().text;
      return name == "_" ? fresh_anon() : make_var(name);
    }
    case detail::Token::Kind::Atom: {
      std::string name = next().text;
      if (at_punct("(")) {
        next();
        std::vector<TermPtr> args;
        args.push_back(parse_term(999));
        while (at_punct(",")) {
          next();
          args.push_back(parse_term(999));
        }
        expect_punct(")");
        return make_struct(name, std::move(args));
      }
      return make_atom(name);
    }
    case detail::Token::Kind::Punct:
      if (t.text == "-") {
        // negative integer literal
        if (toks_[pos_ + 1].kind == detail::Token::Kind::Int) {
          next();
          std::string s = next().text;
          return make_struct("-" + s);
        }
        fail("unexpected '-'");
      }
      if (t.text == "(") {
        next();
        TermPtr inner = parse_term(1200);
        expect_punct(")");
        return inner;
      }
      if (t.text == "[") {
        next();
        if (at_punct("]")) {
          next();
          return nil();
        }
        std::vector<TermPtr> items;
        items.push_back(parse_term(999));
        while (at_punct(",")) {
          next();
          items.push_back(parse_term(999));
        }
        TermPtr tail = nil();
        if (at_punct("|")) {
          next();
          tail = parse_term(999);
        }
        expect_punct("]");
        return make_list(items, tail);
      }
      fail("expected a term");
    default:
      fail("expected a term");
    }
  }

  struct InfixOp {
    int prec;
    bool right_assoc; // xfy
    bool left_same;   // yfx: left operand may have equal priority
  };

  static std::optional<InfixOp> infix(const std::string& s) {
    if (s == ";") return InfixOp{1100, true, false};
    if (s == ",") return InfixOp{1000, true, false};
    if (s == "=") return InfixOp{700, false, false};
    if (s == "-") return InfixOp{500, false, true};
    if (s == "/") return InfixOp{400, false, true};
    return std::nullopt;
  }

  TermPtr parse_term(int max_prec) {
    TermPtr t = parse_primary();
    int cur_prec = 0;
    for (;;) {
      if (cur().kind != detail::Token::Kind::Punct) break;
      auto op = infix(cur().text);
      if (!op || op->prec > max_prec) break;
      if (op->left_same ? cur_prec > op->prec : cur_prec >= op->prec) break;
      std::string sym = next().text;
      int rhs_max = op->right_assoc ? op->prec : op->prec - 1;
      TermPtr rhs = parse_term(rhs_max);
      t = make_struct(sym, {t, rhs});
      cur_prec = op->prec;
    }
    return t;
  }

  // ---- bodies ----

  Body to_body(const TermPtr& t) {
    Body b;
    append_goals(t, b);
    return b;
  }

  void append_goals(const TermPtr& t, Body& b) {
    if (t->is_var()) fail("goal may not be a variable");
    if (t->name == "," && t->args.size() == 2) {
      append_goals(t->args[0], b);
      append_goals(t->args[1], b);
      return;
    }
    if (t->name == ";" && t->args.size() == 2) {
      Goal g;
      g.kind = Goal::Kind::Disj;
      flatten_disj(t, g.branches);
      b.goals.push_back(std::move(g));
      return;
    }
    if (t->name == "=" && t->args.size() == 2) {
      Goal g;
      g.kind = Goal::Kind::Unif;
      g.lhs = t->args[0];
      g.rhs = t->args[1];
      b.goals.push_back(std::move(g));
      return;
    }
    if (t->is_int()) fail("goal may not be an integer");
    if (t->name == "true" && t->args.empty()) return;
    Goal g;
    g.kind = Goal::Kind::Call;
    g.callee = t;
    b.goals.push_back(std::move(g));
  }

  void flatten_disj(const TermPtr& t, std::vector<Body>& out) {
    if (t->is_struct() && t->name == ";" && t->args.size() == 2) {
      flatten_disj(t->args[0], out);
      flatten_disj(t->args[1], out);
      return;
    }
    out.push_back(to_body(t));
  }

  // ---- clauses ----

  Clause parse_clause() {
    Clause c;
    c.loc = loc();
    TermPtr head = parse_term(1199);
    if (head->is_var()) fail("clause head may not be a variable");
    if (head->is_int()) fail("clause head may not be an integer");
    if (head->name == "," || head->name == ";" || head->name == "=")
      fail("clause head may not use a control functor");
    c.head = head;
    if (at_punct(":-")) {
      next();
      TermPtr body = parse_term(1200);
      c.body = to_body(body);
    }
    expect_end();
    return c;
  }

  void add_clause(Module& m, Clause c) {
    std::string name = c.head->name;
    std::size_t arity = c.head->arity();
    PredDef* p = m.find_pred(name, arity);
    if (!p) {
      PredDef d;
      d.name = name;
      d.arity = arity;
      d.loc = c.loc;
      m.preds.push_back(std::move(d));
      p = &m.preds.back();
    }
    p->clauses.push_back(std::move(c));
  }

  // ---- directives ----

  void parse_directive(Module& m, bool& saw_module_decl, const std::string& default_name,
                       std::map<std::pair<std::string, std::size_t>,
                                std::pair<bool, bool>>& flags) {
    if (at_atom("module")) {
      if (saw_module_decl) fail("duplicate module declaration");
      next();
      parse_module_decl(m, default_name);
      saw_module_decl = true;
      expect_end();
      return;
    }
    if (!saw_module_decl) fail("expected ':- module(...)' first");

    if (at_atom("use_module")) {
      next();
      expect_punct("(");
      TermPtr t = parse_term(999);
      expect_punct(")");
      expect_end();
      if (t->is_struct() && t->name == "library" && t->args.size() == 1)
        t = t->args[0];
      if (!t->is_atom()) fail("use_module expects a module name");
      m.imports.push_back(t->name);
      return;
    }
    if (at_atom("pred")) {
      next();
      m.assertions.push_back(parse_assertion_tail(AssertionKind::Pred));
      return;
    }
    if (at_atom("true")) {
      next();
      if (!at_atom("pred")) fail("expected 'pred' after 'true'");
      next();
      m.assertions.push_back(parse_assertion_tail(AssertionKind::TruePred));
      return;
    }
    if (at_atom("trust")) {
      next();
      if (!at_atom("pred")) fail("expected 'pred' after 'trust'");
      next();
      m.assertions.push_back(parse_assertion_tail(AssertionKind::Trust));
      return;
    }
    if (at_atom("prop") || at_atom("regtype")) {
      bool regtype = cur().text == "regtype";
      next();
      auto spec = parse_pred_spec();
      auto& fl = flags[spec];
      fl.first = fl.first || !regtype;
      fl.second = fl.second || regtype;
      expect_end();
      return;
    }
    fail("unknown directive '" + cur().text + "'");
  }

  void parse_module_decl(Module& m, const std::string& default_name) {
    expect_punct("(");
    if (cur().kind == detail::Token::Kind::Var) {
      if (cur().text != "_") fail("module name must be an atom or '_'");
      next();
      if (default_name.empty()) fail("anonymous module requires a default name");
      m.name = default_name;
    } else if (cur().kind == detail::Token::Kind::Atom) {
      m.name = next().text;
    } else {
      fail("module name must be an atom or '_'");
    }
    expect_punct(",");
    if (cur().kind == detail::Token::Kind::Var) {
      next(); // '_' or any variable: export everything
      m.export_all = true;
    } else {
      expect_punct("[");
      if (!at_punct("]")) {
        for (;;) {
          m.exports.push_back(parse_name_arity());
          if (!at_punct(",")) break;
          next();
        }
      }
      expect_punct("]");
    }
    if (at_punct(",")) {
      next();
      expect_punct("[");
      if (!at_punct("]")) {
        for (;;) {
          if (cur().kind != detail::Token::Kind::Atom) fail("module flag must be an atom");
          m.flags.push_back(next().text);
          if (!at_punct(",")) break;
          next();
        }
      }
      expect_punct("]");
    }
    expect_punct(")");
  }

  std::pair<std::string, std::size_t> parse_name_arity() {
    if (cur().kind != detail::Token::Kind::Atom) fail("expected name/arity");
    std::string name = next().text;
    expect_punct("/");
    if (cur().kind != detail::Token::Kind::Int) fail("expected arity");
    return {name, std::stoul(next().text)};
  }

  // 'name/arity' or a descriptor 'name(V1,...,Vn)'.
  std::pair<std::string, std::size_t> parse_pred_spec() {
    if (cur().kind != detail::Token::Kind::Atom) fail("expected predicate spec");
    std::string name = next().text;
    if (at_punct("/")) {
      next();
      if (cur().kind != detail::Token::Kind::Int) fail("expected arity");
      return {name, std::stoul(next().text)};
    }
    if (at_punct("(")) {
      next();
      std::size_t n = 0;
      for (;;) {
        parse_term(999);
        ++n;
        if (!at_punct(",")) break;
        next();
      }
      expect_punct(")");
      return {name, n};
    }
    return {name, 0};
  }

  // ---- assertions ----

  AssertionKind parse_assertion_kind() {
    if (at_atom("pred")) {
      next();
      return AssertionKind::Pred;
    }
    if (at_atom("true")) {
      next();
      if (!at_atom("pred")) fail("expected 'pred' after 'true'");
      next();
      return AssertionKind::TruePred;
    }
    if (at_atom("trust")) {
      next();
      if (!at_atom("pred")) fail("expected 'pred' after 'trust'");
      next();
      return AssertionKind::Trust;
    }
    fail("expected an assertion kind (pred / true pred / trust pred)");
  }

  Assertion parse_assertion_tail(AssertionKind kind) {
    Assertion a;
    a.kind = kind;
    a.loc = loc();

    if (cur().kind == detail::Token::Kind::Var) {
      a.is_query = true;
      a.head_name = next().text;
      if (a.head_name == "_") fail("query assertion head variable may not be '_'");
    } else if (cur().kind == detail::Token::Kind::Atom) {
      a.head_name = next().text;
    } else {
      fail("expected assertion head");
    }

    if (at_punct("(")) {
      next();
      std::set<std::string> seen;
      for (;;) {
        if (cur().kind != detail::Token::Kind::Var || cur().text == "_")
          fail("assertion head must be a descriptor over distinct named variables");
        std::string v = next().text;
        if (!seen.insert(v).second)
          fail("assertion head variables must be distinct");
        a.head_vars.push_back(v);
        if (!at_punct(",")) break;
        next();
      }
      expect_punct(")");
    }

    if (at_punct(":")) {
      next();
      a.pre = to_dnf(parse_term(1100));
    }
    if (at_punct("=>")) {
      next();
      a.post = to_dnf(parse_term(1100));
    }
    if (at_punct("#")) {
      next();
      if (cur().kind != detail::Token::Kind::Str) fail("expected doc string after '#'");
      a.doc = next().text;
    }
    expect_end();
    return a;
  }

  // Formula term -> disjunctive normal form. An empty result means 'true'.
  PropFormula to_dnf(const TermPtr& t) {
    PropFormula f = dnf_walk(t);
    for (const auto& conj : f)
      if (conj.empty()) return {}; // a true disjunct makes the formula true
    return f;
  }

  PropFormula dnf_walk(const TermPtr& t) {
    if (t->is_var()) fail("property formula may not contain a bare variable");
    if (t->name == ";" && t->args.size() == 2) {
      PropFormula l = dnf_walk(t->args[0]);
      PropFormula r = dnf_walk(t->args[1]);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    if (t->name == "," && t->args.size() == 2) {
      PropFormula l = dnf_walk(t->args[0]);
      PropFormula r = dnf_walk(t->args[1]);
      PropFormula out;
      for (const auto& a : l)
        for (const auto& b : r) {
          PropConj c = a;
          c.insert(c.end(), b.begin(), b.end());
          out.push_back(std::move(c));
        }
      return out;
    }
    if (t->name == "true" && t->args.empty()) return {{}};
    if (t->is_int()) fail("property formula may not contain an integer literal");
    if (t->name == "=" && t->args.size() == 2)
      fail("property formula may not contain '='");
    return {{t}};
  }

  const std::string& src_;
  std::vector<detail::Token> toks_;
  std::size_t pos_ = 0;
  unsigned long anon_ = 1;
};

// ---------------------------------------------------------------------------

inline Module parse_module(const std::string& source, const std::string& default_name) {
  Parser p(source);
  return p.parse_module(default_name);
}

inline Assertion parse_assertion(const std::string& text) {
  Parser p(text);
  return p.parse_single_assertion();
}

inline Body parse_goal(const std::string& text) {
  Parser p(text);
  return p.parse_goal();
}

inline TermPtr parse_term_text(const std::string& text) {
  Parser p(text);
  return p.parse_single_term();
}

} // namespace semsearch
