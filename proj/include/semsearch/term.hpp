#pragma once

// Terms of the analyzed language. A term is either a variable or a structure
// f(t1,...,tn); atoms are 0-ary structures and integer constants are leaf
// structures whose functor is the canonical decimal spelling of the value.

#include <cstdint>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace semsearch {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Struct };

  Kind kind;
  std::string name;          // variable name, or functor symbol
  std::vector<TermPtr> args; // empty for variables and atomic constants

  bool is_var() const { return kind == Kind::Var; }
  bool is_struct() const { return kind == Kind::Struct; }
  bool is_atom() const { return kind == Kind::Struct && args.empty() && !is_int(); }
  bool is_int() const {
    if (kind != Kind::Struct || !args.empty() || name.empty()) return false;
    std::size_t i = name[0] == '-' ? 1 : 0;
    if (i == name.size()) return false;
    for (; i < name.size(); ++i)
      if (name[i] < '0' || name[i] > '9') return false;
    return true;
  }
  std::size_t arity() const { return args.size(); }
};

inline TermPtr make_var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  return t;
}

inline TermPtr make_struct(std::string functor, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Struct;
  t->name = std::move(functor);
  t->args = std::move(args);
  return t;
}

inline TermPtr make_atom(std::string name) { return make_struct(std::move(name)); }

inline TermPtr make_int(long long v) { return make_struct(std::to_string(v)); }

inline TermPtr nil() { return make_atom("[]"); }

inline TermPtr cons(TermPtr head, TermPtr tail) {
  return make_struct(".", {std::move(head), std::move(tail)});
}

inline TermPtr make_list(const std::vector<TermPtr>& items, TermPtr tail = nullptr) {
  TermPtr t = tail ? tail : nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) t = cons(*it, t);
  return t;
}

// Identifies a predicate across the corpus.
struct PredId {
  std::string module;
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const PredId& a, const PredId& b) {
    return a.module == b.module && a.name == b.name && a.arity == b.arity;
  }
  friend bool operator<(const PredId& a, const PredId& b) {
    if (a.module != b.module) return a.module < b.module;
    if (a.name != b.name) return a.name < b.name;
    return a.arity < b.arity;
  }
  std::string str() const {
    return (module.empty() ? "" : module + ":") + name + "/" + std::to_string(arity);
  }
};

inline void collect_vars(const TermPtr& t, std::vector<std::string>& out,
                         std::set<std::string>& seen) {
  if (t->is_var()) {
    if (seen.insert(t->name).second) out.push_back(t->name);
    return;
  }
  for (const auto& a : t->args) collect_vars(a, out, seen);
}

// Variables in order of first occurrence.
inline std::vector<std::string> term_vars(const TermPtr& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(t, out, seen);
  return out;
}

inline bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Canonical printing. Lists print as [a,b|T], pairs as A-B, and ','/2 as
// (A,B); everything else prints in canonical functor notation. Atoms that do
// not look like plain identifiers are quoted.

inline bool atom_needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (s == "[]" || s == "." || s == ",") return false;
  if (!(s[0] >= 'a' && s[0] <= 'z')) return true;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '_'))
      return true;
  return false;
}

inline std::string atom_text(const std::string& s) {
  if (!atom_needs_quotes(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

inline void print_term(std::ostream& os, const TermPtr& t);

inline void print_args(std::ostream& os, const std::vector<TermPtr>& args) {
  os << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ',';
    print_term(os, args[i]);
  }
  os << ')';
}

inline void print_term(std::ostream& os, const TermPtr& t) {
  if (t->is_var()) {
    os << t->name;
    return;
  }
  if (t->is_int()) {
    os << t->name;
    return;
  }
  if (t->name == "." && t->args.size() == 2) {
    os << '[';
    TermPtr cur = t;
    bool first = true;
    while (cur->is_struct() && cur->name == "." && cur->args.size() == 2) {
      if (!first) os << ',';
      print_term(os, cur->args[0]);
      first = false;
      cur = cur->args[1];
    }
    if (!(cur->is_struct() && cur->name == "[]" && cur->args.empty())) {
      os << '|';
      print_term(os, cur);
    }
    os << ']';
    return;
  }
  if (t->name == "-" && t->args.size() == 2) {
    print_term(os, t->args[0]);
    os << '-';
    print_term(os, t->args[1]);
    return;
  }
  if (t->name == "," && t->args.size() == 2) {
    os << '(';
    print_term(os, t->args[0]);
    os << ',';
    print_term(os, t->args[1]);
    os << ')';
    return;
  }
  os << atom_text(t->name);
  if (!t->args.empty()) print_args(os, t->args);
}

inline std::string term_text(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

} // namespace semsearch
