#pragma once

// Clause normalization: every clause head becomes p(A, B, ...) over distinct
// canonical variables, with the original argument bindings pushed into leading
// unification goals. Normalizing an already-normal clause is the identity.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "semsearch/program.hpp"
#include "semsearch/term.hpp"

namespace semsearch {

// Positions 0..25 map to A..Z, then V26, V27, ...
inline std::string canonical_arg_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "V" + std::to_string(i);
}

// ---------------------------------------------------------------------------
// Variable renaming over terms, goals and bodies.

inline TermPtr rename_term(const TermPtr& t, const std::map<std::string, std::string>& ren) {
  if (t->is_var()) {
    auto it = ren.find(t->name);
    return it == ren.end() ? t : make_var(it->second);
  }
  if (t->args.empty()) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(rename_term(a, ren));
  return make_struct(t->name, std::move(args));
}

inline Body rename_body(const Body& b, const std::map<std::string, std::string>& ren);

inline Goal rename_goal(const Goal& g, const std::map<std::string, std::string>& ren) {
  Goal out;
  out.kind = g.kind;
  out.loc = g.loc;
  switch (g.kind) {
  case Goal::Kind::Call:
    out.callee = rename_term(g.callee, ren);
    break;
  case Goal::Kind::Unif:
    out.lhs = rename_term(g.lhs, ren);
    out.rhs = rename_term(g.rhs, ren);
    break;
  case Goal::Kind::Disj:
    for (const auto& br : g.branches) out.branches.push_back(rename_body(br, ren));
    break;
  }
  return out;
}

inline Body rename_body(const Body& b, const std::map<std::string, std::string>& ren) {
  Body out;
  for (const auto& g : b.goals) out.goals.push_back(rename_goal(g, ren));
  return out;
}

inline Clause rename_clause(const Clause& c, const std::map<std::string, std::string>& ren) {
  Clause out;
  out.head = rename_term(c.head, ren);
  out.body = rename_body(c.body, ren);
  out.loc = c.loc;
  return out;
}

// ---------------------------------------------------------------------------
// Variable collection in first-occurrence order.

inline void collect_body_vars(const Body& b, std::vector<std::string>& out,
                              std::set<std::string>& seen);

inline void collect_goal_vars(const Goal& g, std::vector<std::string>& out,
                              std::set<std::string>& seen) {
  switch (g.kind) {
  case Goal::Kind::Call:
    collect_vars(g.callee, out, seen);
    break;
  case Goal::Kind::Unif:
    collect_vars(g.lhs, out, seen);
    collect_vars(g.rhs, out, seen);
    break;
  case Goal::Kind::Disj:
    for (const auto& br : g.branches) collect_body_vars(br, out, seen);
    break;
  }
}

inline void collect_body_vars(const Body& b, std::vector<std::string>& out,
                              std::set<std::string>& seen) {
  for (const auto& g : b.goals) collect_goal_vars(g, out, seen);
}

inline std::vector<std::string> body_vars(const Body& b) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_body_vars(b, out, seen);
  return out;
}

inline std::vector<std::string> clause_vars(const Clause& c) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(c.head, out, seen);
  collect_body_vars(c.body, out, seen);
  return out;
}

// ---------------------------------------------------------------------------
// Head normalization.

inline Clause normalize_clause(const Clause& c) {
  std::size_t n = c.head->arity();
  std::vector<std::string> canon(n);
  std::set<std::string> canon_set;
  for (std::size_t i = 0; i < n; ++i) {
    canon[i] = canonical_arg_name(i);
    canon_set.insert(canon[i]);
  }

  // An argument is kept when it is already the canonical variable for its
  // position and that variable has not appeared at an earlier position.
  std::vector<bool> kept(n, false);
  std::set<std::string> kept_names;
  bool all_kept = true;
  for (std::size_t i = 0; i < n; ++i) {
    const TermPtr& a = c.head->args[i];
    if (a->is_var() && a->name == canon[i] && !kept_names.count(a->name)) {
      kept[i] = true;
      kept_names.insert(a->name);
    } else {
      all_kept = false;
    }
  }
  if (all_kept) return c;

  // Canonical names that are not kept head variables must move out of the way
  // before they are reused for the new head.
  std::vector<std::string> vars = clause_vars(c);
  std::set<std::string> used(vars.begin(), vars.end());
  used.insert(canon_set.begin(), canon_set.end());
  std::map<std::string, std::string> ren;
  for (const auto& v : vars) {
    if (!canon_set.count(v) || kept_names.count(v)) continue;
    unsigned k = 0;
    std::string fresh;
    do {
      fresh = v + "_" + std::to_string(k++);
    } while (used.count(fresh));
    used.insert(fresh);
    ren[v] = fresh;
  }
  Clause renamed = rename_clause(c, ren);

  Clause out;
  out.loc = c.loc;
  std::vector<TermPtr> head_args;
  head_args.reserve(n);
  for (std::size_t i = 0; i < n; ++i) head_args.push_back(make_var(canon[i]));
  out.head = make_struct(c.head->name, std::move(head_args));
  for (std::size_t i = 0; i < n; ++i) {
    if (kept[i]) continue;
    Goal g;
    g.kind = Goal::Kind::Unif;
    g.lhs = make_var(canon[i]);
    g.rhs = renamed.head->args[i];
    g.loc = c.loc;
    out.body.goals.push_back(std::move(g));
  }
  for (auto& g : renamed.body.goals) out.body.goals.push_back(std::move(g));
  return out;
}

inline PredDef normalize_pred(const PredDef& p) {
  PredDef out = p;
  out.clauses.clear();
  for (const auto& c : p.clauses) out.clauses.push_back(normalize_clause(c));
  return out;
}

} // namespace semsearch
