#pragma once

// Search queries are assertion-shaped: a block of `pred` assertions over a
// common head descriptor, optionally packaged in a findp/4 goal together
// with a module/name/arity pattern and a required status.  The block may
// also carry its own property and regtype definitions, which behave as if
// they were part of every searched module.

#include "parser.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semsearch {

struct QueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PredicateQuery {
  std::vector<Assertion> assertions;  // renamed to the common head variables
  Module defs;                        // definitions shipped with the query
  std::string head_symbol;            // the query's predicate variable
  std::vector<std::string> head_vars; // common descriptor variables
  std::size_t arity = 0;
  std::optional<std::string> module_filter; // bound module in M:P/A
  std::optional<std::string> pred_filter;   // bound predicate name in M:P/A
  std::optional<std::string> required_status; // checked / check / false
};

// One verification condition induced by the query's assertions: a single
// calls condition (the join of every precondition) plus one success
// condition per assertion with a postcondition.
struct AssertionCondition {
  enum class Kind { Calls, Success };
  Kind kind = Kind::Calls;
  PropFormula pre;
  PropFormula post; // Success only
  std::string text; // presentation form, e.g. calls(X(A,B),(list(A),var(B)))
};

namespace detail {

inline std::string conj_text(const PropConj& conj) {
  if (conj.empty()) return "true";
  std::string s;
  for (std::size_t i = 0; i < conj.size(); ++i)
    s += (i ? "," : "") + term_text(conj[i]);
  return conj.size() > 1 ? "(" + s + ")" : s;
}

inline std::string formula_text(const PropFormula& f) {
  if (f.empty()) return "true";
  if (f.size() == 1) return conj_text(f[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < f.size(); ++i)
    s += (i ? ";" : "") + conj_text(f[i]);
  return s + ")";
}

inline std::string head_text(const std::string& symbol,
                             const std::vector<std::string>& vars) {
  std::string s = symbol + "(";
  for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + vars[i];
  return s + ")";
}

inline TermPtr rename_prop_term(const TermPtr& t,
                                const std::map<std::string, std::string>& m) {
  if (t->is_var()) {
    auto it = m.find(t->name);
    return it == m.end() ? t : make_var(it->second);
  }
  std::vector<TermPtr> args;
  for (const auto& a : t->args) args.push_back(rename_prop_term(a, m));
  return make_struct(t->name, std::move(args));
}

inline PropFormula rename_formula(const PropFormula& f,
                                  const std::map<std::string, std::string>& m) {
  PropFormula out;
  for (const auto& conj : f) {
    PropConj c;
    for (const auto& lit : conj) c.push_back(rename_prop_term(lit, m));
    out.push_back(std::move(c));
  }
  return out;
}

// Positional rename of one assertion onto the common head variables; local
// variables are suffixed per assertion so they cannot collide.
inline Assertion align_assertion(const Assertion& a,
                                 const std::vector<std::string>& common,
                                 std::size_t index) {
  std::map<std::string, std::string> m;
  std::set<std::string> taken(common.begin(), common.end());
  for (std::size_t i = 0; i < common.size(); ++i) m[a.head_vars[i]] = common[i];
  auto visit = [&](const PropFormula& f) {
    for (const auto& conj : f)
      for (const auto& lit : conj)
        for (const auto& v : term_vars(lit))
          if (!m.count(v)) {
            std::string fresh = v + "_q" + std::to_string(index);
            while (taken.count(fresh)) fresh += "x";
            taken.insert(fresh);
            m[v] = fresh;
          }
  };
  visit(a.pre);
  visit(a.post);
  Assertion out = a;
  out.head_vars = common;
  out.pre = rename_formula(a.pre, m);
  out.post = rename_formula(a.post, m);
  return out;
}

// Scan a {...} block, honoring quoted atoms, strings and % comments.
inline std::size_t block_end(const std::string& s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '%') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '\'' || c == '"') {
      char q = c;
      for (++i; i < s.size(); ++i) {
        if (s[i] == '\\') {
          ++i;
        } else if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) ++i; // doubled quote
          else break;
        }
      }
      if (i >= s.size()) throw QueryError("unterminated quote in query block");
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  throw QueryError("unterminated '{' in query");
}

inline std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool is_var_name(const std::string& s) {
  if (s.empty()) return false;
  if (s[0] != '_' && !(s[0] >= 'A' && s[0] <= 'Z')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline bool is_atom_name(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// Split "a, b, c" at top-level commas (parens only; the block is gone).
inline std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trimmed(cur).empty()) out.push_back(trimmed(cur));
  return out;
}

} // namespace detail

// Builds the query struct from either a findp/4 goal or a bare block of
// assertions and property definitions.
inline PredicateQuery parse_query(const std::string& text) {
  using detail::trimmed;
  std::string src = trimmed(text);
  if (src.rfind("?-", 0) == 0) src = trimmed(src.substr(2));

  PredicateQuery q;
  std::string block = src;
  bool have_arity = false;

  if (src.rfind("findp", 0) == 0) {
    std::size_t open = src.find('(', 5);
    if (open == std::string::npos) throw QueryError("findp: expected '('");
    std::size_t brace = src.find('{', open);
    if (brace == std::string::npos)
      throw QueryError("findp: expected '{' assertion block");
    std::size_t close = detail::block_end(src, brace);
    block = src.substr(brace + 1, close - brace - 1);

    std::string tail = trimmed(src.substr(close + 1));
    if (tail.empty() || tail[0] != ',')
      throw QueryError("findp: expected ',' after the assertion block");
    tail = trimmed(tail.substr(1));
    if (!tail.empty() && tail.back() == '.') tail.pop_back();
    tail = trimmed(tail);
    if (tail.empty() || tail.back() != ')')
      throw QueryError("findp: expected closing ')'");
    tail.pop_back();

    std::vector<std::string> args = detail::split_args(tail);
    if (args.size() != 3)
      throw QueryError("findp expects (block, M:P/A, Residue, Status)");

    // descriptor M:P/A
    const std::string& desc = args[0];
    std::size_t colon = desc.find(':');
    std::size_t slash = desc.rfind('/');
    if (colon == std::string::npos || slash == std::string::npos ||
        slash < colon)
      throw QueryError("findp: descriptor must look like M:P/A");
    std::string mpart = trimmed(desc.substr(0, colon));
    std::string ppart = trimmed(desc.substr(colon + 1, slash - colon - 1));
    std::string apart = trimmed(desc.substr(slash + 1));
    if (detail::is_atom_name(mpart)) q.module_filter = mpart;
    else if (!detail::is_var_name(mpart))
      throw QueryError("findp: bad module pattern '" + mpart + "'");
    if (detail::is_atom_name(ppart)) q.pred_filter = ppart;
    else if (!detail::is_var_name(ppart))
      throw QueryError("findp: bad predicate pattern '" + ppart + "'");
    std::size_t pos = 0;
    unsigned long declared_arity = 0;
    try {
      declared_arity = std::stoul(apart, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != apart.size())
      throw QueryError("findp: arity must be an integer");

    if (!detail::is_var_name(args[1]))
      throw QueryError("findp: Residue must be a variable");

    const std::string& st = args[2];
    if (detail::is_atom_name(st)) {
      if (st != "checked" && st != "check" && st != "false")
        throw QueryError("findp: status must be checked, check or false");
      q.required_status = st;
    } else if (!detail::is_var_name(st)) {
      throw QueryError("findp: bad status argument '" + st + "'");
    }
    q.arity = declared_arity;
    have_arity = true;
  }

  // The block is a miniature source file; give it a synthetic module header
  // so property definitions inside it parse as ordinary predicates.
  std::string wrapped = ":- module(query, _).\n" + block;
  try {
    q.defs = parse_module(wrapped, "query");
  } catch (const ParseError& e) {
    throw QueryError(std::string("query block: ") + e.what());
  }

  for (const Assertion& a : q.defs.assertions)
    if (a.is_query) q.assertions.push_back(a);
  if (q.assertions.empty())
    throw QueryError("query contains no assertion with a variable head");

  const Assertion& first = q.assertions.front();
  q.head_symbol = first.head_name;
  q.head_vars = first.head_vars;
  if (!have_arity) q.arity = first.arity();
  if (q.arity != first.arity())
    throw QueryError("descriptor arity does not match the query assertions");

  for (std::size_t i = 0; i < q.assertions.size(); ++i) {
    Assertion& a = q.assertions[i];
    if (a.head_name != q.head_symbol)
      throw QueryError("query assertions must share one head variable");
    if (a.arity() != q.arity)
      throw QueryError("query assertions must share one arity");
    a = detail::align_assertion(a, q.head_vars, i);
  }
  return q;
}

// The conditions a matching predicate has to satisfy (assertions already
// share the common head variables).
inline std::vector<AssertionCondition>
conditions_for(const std::string& head_symbol,
               const std::vector<std::string>& head_vars,
               const std::vector<Assertion>& assertions) {
  std::vector<AssertionCondition> out;

  AssertionCondition calls;
  calls.kind = AssertionCondition::Kind::Calls;
  bool always = false;
  for (const Assertion& a : assertions) {
    if (a.pre.empty()) always = true; // one true disjunct swallows the rest
    for (const auto& conj : a.pre) calls.pre.push_back(conj);
  }
  if (always) calls.pre.clear();
  calls.text = "calls(" + detail::head_text(head_symbol, head_vars) + "," +
               detail::formula_text(calls.pre) + ")";
  out.push_back(std::move(calls));

  for (const Assertion& a : assertions) {
    if (!a.has_post()) continue;
    AssertionCondition c;
    c.kind = AssertionCondition::Kind::Success;
    c.pre = a.pre;
    c.post = a.post;
    c.text = "success(" + detail::head_text(head_symbol, head_vars) + "," +
             detail::formula_text(c.pre) + "," + detail::formula_text(c.post) +
             ")";
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<AssertionCondition> conditions_for(const PredicateQuery& q) {
  return conditions_for(q.head_symbol, q.head_vars, q.assertions);
}

} // namespace semsearch
