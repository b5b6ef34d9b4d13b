#pragma once

// Triangular substitutions, unification with occurs check, and variance
// (alpha-equivalence) tests between terms.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "semsearch/term.hpp"

namespace semsearch {

struct Subst {
  std::map<std::string, TermPtr> bind;

  bool bound(const std::string& v) const { return bind.count(v) != 0; }

  // Dereference a variable chain one level at a time.
  TermPtr walk(TermPtr t) const {
    while (t->is_var()) {
      auto it = bind.find(t->name);
      if (it == bind.end()) return t;
      t = it->second;
    }
    return t;
  }

  TermPtr apply(const TermPtr& t) const {
    TermPtr w = walk(t);
    if (w->is_var() || w->args.empty()) return w;
    std::vector<TermPtr> args;
    args.reserve(w->args.size());
    for (const auto& a : w->args) args.push_back(apply(a));
    return make_struct(w->name, std::move(args));
  }
};

inline bool occurs_in(const std::string& v, const TermPtr& t, const Subst& s) {
  TermPtr w = s.walk(t);
  if (w->is_var()) return w->name == v;
  for (const auto& a : w->args)
    if (occurs_in(v, a, s)) return true;
  return false;
}

// Unification with occurs check; extends s in place and reports success.
// On failure s may hold a partial extension, so callers branch on a copy.
inline bool unify(const TermPtr& a, const TermPtr& b, Subst& s) {
  TermPtr x = s.walk(a);
  TermPtr y = s.walk(b);
  if (x->is_var() && y->is_var() && x->name == y->name) return true;
  if (x->is_var()) {
    if (occurs_in(x->name, y, s)) return false;
    s.bind[x->name] = y;
    return true;
  }
  if (y->is_var()) {
    if (occurs_in(y->name, x, s)) return false;
    s.bind[y->name] = x;
    return true;
  }
  if (x->name != y->name || x->args.size() != y->args.size()) return false;
  for (std::size_t i = 0; i < x->args.size(); ++i)
    if (!unify(x->args[i], y->args[i], s)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Variance: two terms are variants when some variable bijection maps one onto
// the other.

inline bool variant_walk(const TermPtr& a, const TermPtr& b,
                         std::map<std::string, std::string>& fwd,
                         std::map<std::string, std::string>& bwd) {
  if (a->is_var() != b->is_var()) return false;
  if (a->is_var()) {
    auto f = fwd.find(a->name);
    auto g = bwd.find(b->name);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[a->name] = b->name;
      bwd[b->name] = a->name;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == b->name &&
           g->second == a->name;
  }
  if (a->name != b->name || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!variant_walk(a->args[i], b->args[i], fwd, bwd)) return false;
  return true;
}

inline bool variant(const TermPtr& a, const TermPtr& b) {
  std::map<std::string, std::string> fwd, bwd;
  return variant_walk(a, b, fwd, bwd);
}

// Canonical text with variables renamed in first-occurrence order, so variant
// terms render identically.
inline TermPtr canonicalize_vars(const TermPtr& t, std::map<std::string, std::string>& ren) {
  if (t->is_var()) {
    auto it = ren.find(t->name);
    if (it == ren.end())
      it = ren.emplace(t->name, "V" + std::to_string(ren.size() + 1)).first;
    return make_var(it->second);
  }
  if (t->args.empty()) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(canonicalize_vars(a, ren));
  return make_struct(t->name, std::move(args));
}

inline std::string variant_text(const TermPtr& t) {
  std::map<std::string, std::string> ren;
  return term_text(canonicalize_vars(t, ren));
}

} // namespace semsearch
