#pragma once

// Shape domain: one regular type per variable.  Unification intersects the
// types of both sides (glb) and pushes the result back down through term
// structure.  Success shapes are widened by joining into a canonical form
// that folds unions back onto declared regtypes when they line up.

#include "abstract.hpp"
#include "program.hpp"
#include "shapes_types.hpp"
#include "term.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semsearch {
namespace shapes {

inline AbstractSubst top(TypeTable& tt, const std::vector<std::string>& vars) {
  AbstractSubst a;
  a.dom = DomainId::Shapes;
  a.vars = vars;
  for (const auto& v : vars) a.ty[v] = tt.top();
  return a;
}

inline bool is_top(TypeTable& tt, const AbstractSubst& a) {
  if (a.bot) return false;
  for (const auto& [v, t] : a.ty) {
    (void)v;
    if (!tt.equal(t, tt.top())) return false;
  }
  return true;
}

inline bool leq(TypeTable& tt, const AbstractSubst& a, const AbstractSubst& b) {
  if (a.bot) return true;
  if (b.bot) return false;
  for (const auto& v : a.vars)
    if (!tt.leq(a.ty.at(v), b.ty.at(v))) return false;
  return true;
}

inline bool equal(TypeTable& tt, const AbstractSubst& a, const AbstractSubst& b) {
  return leq(tt, a, b) && leq(tt, b, a);
}

inline AbstractSubst lub(TypeTable& tt, const AbstractSubst& a,
                         const AbstractSubst& b) {
  if (a.bot) return b;
  if (b.bot) return a;
  AbstractSubst r;
  r.dom = DomainId::Shapes;
  r.vars = a.vars;
  for (const auto& v : a.vars)
    r.ty[v] = tt.union_of({a.ty.at(v), b.ty.at(v)});
  return r;
}

// The per-variable join describes the product of the variable types, so it
// is only the exact union when the operands differ in at most one position
// (or are comparable).
inline AbstractSubst lub_exact(TypeTable& tt, const AbstractSubst& a,
                               const AbstractSubst& b, bool& exact) {
  if (a.bot || b.bot) {
    exact = true;
    return lub(tt, a, b);
  }
  int differing = 0;
  for (const auto& v : a.vars)
    if (!tt.equal(a.ty.at(v), b.ty.at(v))) ++differing;
  exact = differing <= 1 || leq(tt, a, b) || leq(tt, b, a);
  return lub(tt, a, b);
}

inline AbstractSubst glb(TypeTable& tt, const AbstractSubst& a,
                         const AbstractSubst& b) {
  if (a.bot) return a;
  if (b.bot) return b;
  AbstractSubst r;
  r.dom = DomainId::Shapes;
  r.vars = a.vars;
  for (const auto& v : a.vars) {
    int t = tt.glb(a.ty.at(v), b.ty.at(v));
    if (t == tt.bot()) return bottom_elem(DomainId::Shapes, a.vars);
    r.ty[v] = t;
  }
  return r;
}

// ---- abstract unification ----

inline int type_of_term(TypeTable& tt, const AbstractSubst& a, const TermPtr& t) {
  if (t->is_var()) {
    auto it = a.ty.find(t->name);
    if (it == a.ty.end())
      throw std::logic_error("shapes: unknown variable " + t->name);
    return it->second;
  }
  std::vector<int> kids;
  for (const auto& arg : t->args) kids.push_back(type_of_term(tt, a, arg));
  return tt.cons(t->name, std::move(kids)); // constants are nullary nodes
}

// Splits a type along constructor f/n: the per-argument types any value of
// `id` with that constructor must have.  nullopt when no value of `id` can
// have the constructor.
inline std::optional<std::vector<int>> decompose(TypeTable& tt, int id,
                                                 const std::string& f,
                                                 std::size_t n) {
  int r = tt.resolve(id);
  const TypeExpr& e = tt.at(r);
  switch (e.k) {
  case TypeExpr::K::Top:
    return std::vector<int>(n, tt.top());
  case TypeExpr::K::List:
    if (f == "." && n == 2)
      return std::vector<int>{e.kids[0], tt.list_of(e.kids[0])};
    return std::nullopt;
  case TypeExpr::K::Cons:
    if (e.functor == f && e.kids.size() == n) return e.kids;
    return std::nullopt;
  case TypeExpr::K::Union: {
    std::vector<std::vector<int>> matches;
    for (int alt : e.kids)
      if (auto kids = decompose(tt, alt, f, n)) matches.push_back(*kids);
    if (matches.empty()) return std::nullopt;
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> slot;
      for (const auto& m : matches) slot.push_back(m[i]);
      out.push_back(tt.union_of(slot));
    }
    return out;
  }
  default:
    return std::nullopt; // Bot, Int, Num, Atm have no structured values
  }
}

// Narrows the term's variables so the term lies within `id`.
inline bool constrain(TypeTable& tt, AbstractSubst& a, const TermPtr& t, int id) {
  if (t->is_var()) {
    int nt = tt.glb(a.ty.at(t->name), id);
    if (nt == tt.bot()) return false;
    a.ty[t->name] = nt;
    return true;
  }
  if (t->args.empty())
    return tt.glb(tt.cons(t->name, {}), id) != tt.bot();
  auto kids = decompose(tt, id, t->name, t->args.size());
  if (!kids) return false;
  for (std::size_t i = 0; i < t->args.size(); ++i)
    if (!constrain(tt, a, t->args[i], (*kids)[i])) return false;
  return true;
}

inline AbstractSubst amgu(TypeTable& tt, const AbstractSubst& a,
                          const TermPtr& lhs, const TermPtr& rhs) {
  if (a.bot) return a;
  int t = tt.glb(type_of_term(tt, a, lhs), type_of_term(tt, a, rhs));
  if (t == tt.bot()) return bottom_elem(DomainId::Shapes, a.vars);
  AbstractSubst r = a;
  if (!constrain(tt, r, lhs, t) || !constrain(tt, r, rhs, t))
    return bottom_elem(DomainId::Shapes, a.vars);
  return r;
}

// ---- variable bookkeeping ----

inline AbstractSubst extend(TypeTable& tt, const AbstractSubst& a,
                            const std::vector<std::string>& fresh) {
  AbstractSubst r = a;
  for (const auto& v : fresh) {
    if (r.has_var(v)) continue;
    r.vars.push_back(v);
    if (!r.bot) r.ty[v] = tt.top();
  }
  return r;
}

inline AbstractSubst project(const AbstractSubst& a,
                             const std::vector<std::string>& keep) {
  AbstractSubst r;
  r.dom = DomainId::Shapes;
  r.vars = keep;
  r.bot = a.bot;
  if (a.bot) return r;
  for (const auto& v : keep) r.ty[v] = a.ty.at(v);
  return r;
}

inline AbstractSubst rename(const AbstractSubst& a,
                            const std::map<std::string, std::string>& m) {
  auto nm = [&m](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  AbstractSubst r;
  r.dom = DomainId::Shapes;
  r.bot = a.bot;
  for (const auto& v : a.vars) r.vars.push_back(nm(v));
  for (const auto& [v, t] : a.ty) r.ty[nm(v)] = t;
  return r;
}

// Success of a call: each actual argument is narrowed by the callee's
// success type at that position.  With one type per variable there is no
// cross-argument state to carry over.
inline AbstractSubst apply_call_success(TypeTable& tt, const AbstractSubst& call,
                                        const std::vector<TermPtr>& actuals,
                                        const AbstractSubst& succ) {
  if (call.bot) return call;
  if (succ.bot) return bottom_elem(DomainId::Shapes, call.vars);
  if (succ.vars.size() != actuals.size())
    throw std::logic_error("shapes: arity mismatch in call/success combination");
  AbstractSubst r = call;
  for (std::size_t i = 0; i < actuals.size(); ++i)
    if (!constrain(tt, r, actuals[i], succ.ty.at(succ.vars[i])))
      return bottom_elem(DomainId::Shapes, call.vars);
  return r;
}

// ---- widening ----

// Folds alternatives with a common outermost constructor into one, so the
// breadth of a union is bounded by the constructors in the module.  `lossy`
// reports whether some merge strictly grew the denotation.
inline std::vector<int> determinize(TypeTable& tt, const std::vector<int>& alts,
                                    bool& lossy) {
  struct Bucket {
    std::string functor;
    std::size_t arity = 0;
    bool is_list = false;
    std::vector<std::vector<int>> args;
  };
  std::vector<Bucket> buckets;
  std::vector<int> passthrough;
  for (int alt : alts) {
    int r = tt.resolve(alt);
    const TypeExpr& e = tt.at(r);
    if (e.k == TypeExpr::K::List) {
      Bucket* b = nullptr;
      for (auto& cand : buckets)
        if (cand.is_list) b = &cand;
      if (!b) {
        buckets.push_back({"", 1, true, {}});
        b = &buckets.back();
      }
      b->args.push_back({e.kids[0]});
    } else if (e.k == TypeExpr::K::Cons && !e.kids.empty()) {
      Bucket* b = nullptr;
      for (auto& cand : buckets)
        if (!cand.is_list && cand.functor == e.functor &&
            cand.arity == e.kids.size())
          b = &cand;
      if (!b) {
        buckets.push_back({e.functor, e.kids.size(), false, {}});
        b = &buckets.back();
      }
      b->args.push_back(e.kids);
    } else {
      passthrough.push_back(alt); // leaves, constants, refs kept as they are
    }
  }
  std::vector<int> out = passthrough;
  for (auto& b : buckets) {
    std::vector<int> slots;
    for (std::size_t i = 0; i < b.arity; ++i) {
      std::vector<int> col;
      for (const auto& row : b.args) col.push_back(row[i]);
      slots.push_back(tt.union_of(col));
    }
    if (b.args.size() > 1) {
      // merging f(a,b)|f(c,d) into f(a|c,b|d) mixes argument combinations
      // unless there is a single argument
      if (b.arity >= 2) lossy = true;
      if (b.is_list) {
        // list(a)|list(b) admits mixed-element lists once joined
        bool comparable = tt.leq(b.args[0][0], b.args[1][0]) ||
                          tt.leq(b.args[1][0], b.args[0][0]);
        if (b.args.size() > 2 || !comparable) lossy = true;
      }
    }
    out.push_back(b.is_list ? tt.list_of(slots[0])
                            : tt.cons(b.functor, std::move(slots)));
  }
  // drop alternatives another alternative already covers
  std::vector<int> kept;
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (i == j) continue;
      if (!tt.leq(out[i], out[j])) continue;
      bool both = tt.leq(out[j], out[i]);
      // among equals keep the first
      if (!both || j < i) { covered = true; break; }
    }
    if (!covered) kept.push_back(out[i]);
  }
  return kept;
}

namespace detail {

// Replaces structural nodes nested deeper than `max_depth` by the smallest
// declared type above them (or Top).  Named references count as atomic;
// unions are transparent; constants are fine at any depth.
inline int truncate_deep(TypeTable& tt, int id, int depth, int max_depth,
                         std::set<int>& visiting) {
  int r = tt.resolve(id);
  if (tt.name_of(id) && depth > 0) return id;   // named reference: atomic
  if (tt.name_of(r) && depth > 0) return r;
  if (!visiting.insert(r).second) return r;     // recursive anonymous slot
  const TypeExpr& e = tt.at(r);
  int result = r;
  switch (e.k) {
  case TypeExpr::K::List:
  case TypeExpr::K::Cons: {
    bool structural = e.k == TypeExpr::K::List || !e.kids.empty();
    if (structural && depth >= max_depth) {
      // smallest declared type covering this node, else Top
      int best = tt.top();
      for (const auto& name : tt.declared()) {
        int d = *tt.named(name);
        if (tt.leq(r, d) && tt.leq(d, best)) best = d;
      }
      result = best;
      break;
    }
    if (!e.kids.empty()) {
      std::vector<int> kids;
      bool changed = false;
      for (int k : e.kids) {
        int nk = truncate_deep(tt, k, structural ? depth + 1 : depth,
                               max_depth, visiting);
        changed |= nk != k;
        kids.push_back(nk);
      }
      if (changed)
        result = e.k == TypeExpr::K::List ? tt.list_of(kids[0])
                                          : tt.cons(e.functor, std::move(kids));
    }
    break;
  }
  case TypeExpr::K::Union: {
    std::vector<int> kids;
    bool changed = false;
    for (int k : e.kids) {
      int nk = truncate_deep(tt, k, depth, max_depth, visiting);
      changed |= nk != k;
      kids.push_back(nk);
    }
    if (changed) result = tt.union_of(kids);
    break;
  }
  default:
    break;
  }
  visiting.erase(r);
  return result;
}

} // namespace detail

// Canonical form used when joining success shapes: determinize, then fold
// unions that line up with a declared regtype, then bound the depth.
inline int canonicalize(TypeTable& tt, int id) {
  int r = tt.resolve(id);
  const TypeExpr& e = tt.at(r);
  std::vector<int> alts =
      e.k == TypeExpr::K::Union ? std::vector<int>(e.kids) : std::vector<int>{r};
  bool lossy = false;
  alts = determinize(tt, alts, lossy);
  int u = tt.union_of(alts);

  int ur = tt.resolve(u);
  if (tt.at(ur).k == TypeExpr::K::Union) {
    // (a) the union is exactly a declared type: use its name
    for (const auto& name : tt.declared()) {
      int d = *tt.named(name);
      if (tt.equal(u, d)) return d;
    }
    // (b) the union strictly outgrew some declared type: widen to the
    // smallest declared type that covers it (or Top)
    bool outgrew = false;
    for (const auto& name : tt.declared()) {
      int d = *tt.named(name);
      if (tt.resolve(d) == tt.bot()) continue;
      if (tt.leq(d, u) && !tt.leq(u, d)) { outgrew = true; break; }
    }
    if (outgrew) {
      int best = tt.top();
      for (const auto& name : tt.declared()) {
        int d = *tt.named(name);
        if (tt.leq(u, d) && tt.leq(d, best)) best = d;
      }
      u = best;
    }
    // (c) otherwise the union is kept as a synthesized type
  }

  std::set<int> visiting;
  return detail::truncate_deep(tt, u, 0, 2, visiting);
}

inline AbstractSubst widen(TypeTable& tt, const AbstractSubst& prev,
                           const AbstractSubst& next) {
  if (prev.bot) {
    AbstractSubst r = next;
    if (!r.bot)
      for (const auto& v : r.vars) r.ty[v] = canonicalize(tt, r.ty.at(v));
    return r;
  }
  if (next.bot) return prev;
  AbstractSubst r;
  r.dom = DomainId::Shapes;
  r.vars = prev.vars;
  for (const auto& v : prev.vars)
    r.ty[v] = canonicalize(tt, tt.union_of({prev.ty.at(v), next.ty.at(v)}));
  return r;
}

// ---- regtypes as types ----
//
// A unary prop or regtype whose clauses are plain shape patterns translates
// to a type: each clause head argument is one alternative, and body literals
// of the form q(V) or list(V,Elem) constrain the pattern's variables.
// Anything else (extra goals, repeated pattern variables, constraints on
// non-pattern variables, var/ground tests) rejects the translation and the
// property contributes no shape information.

struct TypeBinder {
  TypeTable& tt;
  const ModuleMap* mods = nullptr;
  const Module* target = nullptr;
  const Module* query = nullptr; // query-shipped definitions shadow the rest

  enum class PropShape { NoInfo, Type, Unknown };

  explicit TypeBinder(TypeTable& table) : tt(table) {
    int list = tt.alloc_named("list");
    tt.define(list, tt.list_of(tt.top()));
    tt.mark_declared("list");
    ids_["list"] = list;
    exact_["list"] = true;
  }

  // Classifies property `name` used as a unary constraint.
  PropShape prop_type(const std::string& name, int& id, bool& exact) {
    if (name == "int") { id = tt.t_int(); exact = true; return PropShape::Type; }
    if (name == "num") { id = tt.t_num(); exact = true; return PropShape::Type; }
    if (name == "atm") { id = tt.t_atm(); exact = true; return PropShape::Type; }
    if (name == "term") { id = tt.top(); exact = true; return PropShape::Type; }
    if (name == "var" || name == "ground") return PropShape::NoInfo;
    if (auto slot = type_for(name)) {
      id = *slot;
      exact = is_exact(name);
      return PropShape::Type;
    }
    const Module* src = nullptr;
    if (find_prop_def(name, &src)) {
      id = tt.top(); // defined but not a shape pattern: no information
      exact = false;
      return PropShape::Type;
    }
    return PropShape::Unknown;
  }

  // Translates a user property to a type slot, or nullopt when its clauses
  // are not shape patterns.
  std::optional<int> type_for(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    if (failed_.count(name)) return std::nullopt;
    std::set<std::string> visiting;
    if (!validate(name, visiting)) {
      failed_.insert(name);
      return std::nullopt;
    }
    return translate(name);
  }

  // A property is exact when its own translation and every property it
  // references are; reference cycles are exact coinductively.
  bool is_exact(const std::string& name) const {
    std::set<std::string> visiting;
    return exact_walk(name, visiting);
  }

  // Translates every unary prop/regtype of the source module (then its
  // imports) up front and registers the successful ones as declared, in a
  // deterministic order the widening can use as preference.
  void declare_module_types() {
    if (target) declare_from(*target);
    if (target && mods)
      for (const auto& imp : target->imports)
        if (const Module* m = find_module(*mods, imp)) declare_from(*m);
  }

  void declare_query_types() {
    if (query) declare_from(*query);
  }

private:
  std::map<std::string, int> ids_;
  std::map<std::string, bool> exact_;
  std::map<std::string, std::set<std::string>> deps_;
  std::set<std::string> failed_;

  void declare_from(const Module& m) {
    for (const auto& d : m.preds) {
      if (d.arity != 1 || !(d.is_prop || d.is_regtype)) continue;
      if (auto slot = type_for(d.name))
        tt.mark_declared(*tt.name_of(*slot));
    }
  }

  const PredDef* find_prop_def(const std::string& name, const Module** src) const {
    auto usable = [](const PredDef* d) {
      return d && (d->is_prop || d->is_regtype) && d->arity == 1 &&
             !d->clauses.empty();
    };
    const PredDef* d = nullptr;
    if (query && usable(d = query->find_pred(name, 1))) {
      *src = query;
      return d;
    }
    if (target && usable(d = target->find_pred(name, 1))) {
      *src = target;
      return d;
    }
    if (target && mods)
      for (const auto& imp : target->imports) {
        const Module* m = find_module(*mods, imp);
        if (m && m->is_exported(name, 1) && usable(d = m->find_pred(name, 1))) {
          *src = m;
          return d;
        }
      }
    return nullptr;
  }

  static bool linear_pattern(const TermPtr& t, std::set<std::string>& seen) {
    if (t->is_var()) return seen.insert(t->name).second;
    for (const auto& a : t->args)
      if (!linear_pattern(a, seen)) return false;
    return true;
  }

  // name resolves to clauses that are all shape patterns
  bool validate(const std::string& name, std::set<std::string>& visiting) {
    if (ids_.count(name)) return true;
    if (failed_.count(name)) return false;
    if (!visiting.insert(name).second) return true; // recursive: assume ok
    const Module* src = nullptr;
    const PredDef* def = find_prop_def(name, &src);
    if (!def) return false;
    for (const auto& c : def->clauses) {
      std::set<std::string> pat;
      if (!linear_pattern(c.head->args[0], pat)) return false;
      for (const auto& g : c.body.goals) {
        if (g.kind != Goal::Kind::Call) return false;
        const auto& args = g.callee->args;
        if (args.size() == 1) {
          if (!args[0]->is_var() || !pat.count(args[0]->name)) return false;
          const std::string& q = g.callee->name;
          if (q == "int" || q == "num" || q == "atm" || q == "term") continue;
          if (q == "var" || q == "ground") return false;
          if (!validate(q, visiting)) return false;
        } else if (g.callee->name == "list" && args.size() == 2) {
          if (!args[0]->is_var() || !pat.count(args[0]->name)) return false;
          if (!args[1]->is_atom()) return false;
          const std::string& q = args[1]->name;
          if (q == "int" || q == "num" || q == "atm" || q == "term") continue;
          if (!validate(q, visiting)) return false;
        } else {
          return false;
        }
      }
    }
    return true;
  }

  int resolve_constraint_name(const std::string& q) {
    if (q == "int") return tt.t_int();
    if (q == "num") return tt.t_num();
    if (q == "atm") return tt.t_atm();
    if (q == "term") return tt.top();
    return *translate(q); // validated beforehand
  }

  int skeleton(const TermPtr& t,
               const std::map<std::string, std::vector<int>>& constraints,
               bool& exact) {
    if (t->is_var()) {
      auto it = constraints.find(t->name);
      if (it == constraints.end() || it->second.empty()) return tt.top();
      int ty = it->second[0];
      for (std::size_t i = 1; i < it->second.size(); ++i) {
        ty = tt.glb(ty, it->second[i]);
        exact = false; // intersections are sound but not certified exact
      }
      return ty;
    }
    std::vector<int> kids;
    for (const auto& a : t->args) kids.push_back(skeleton(a, constraints, exact));
    return tt.cons(t->name, std::move(kids));
  }

  std::optional<int> translate(const std::string& name) {
    auto hit = ids_.find(name);
    if (hit != ids_.end()) return hit->second;
    const Module* src = nullptr;
    const PredDef* def = find_prop_def(name, &src);
    if (!def) return std::nullopt;

    // query definitions may collide with a name the table already holds
    std::string slot_name = name;
    int suffix = 2;
    while (tt.named(slot_name) && !ids_.count(name))
      slot_name = name + "#" + std::to_string(suffix++);
    int slot = tt.alloc_named(slot_name);
    ids_[name] = slot;
    exact_[name] = true;

    bool exact = true;
    std::vector<int> alts;
    for (const auto& c : def->clauses) {
      std::map<std::string, std::vector<int>> constraints;
      for (const auto& g : c.body.goals) {
        const auto& args = g.callee->args;
        int ty;
        if (g.callee->name == "list" && args.size() == 2) {
          const std::string& q = args[1]->name;
          ty = tt.list_of(resolve_constraint_name(q));
          if (q != "int" && q != "num" && q != "atm" && q != "term")
            deps_[name].insert(q);
        } else {
          const std::string& q = g.callee->name;
          ty = resolve_constraint_name(q);
          if (q != "int" && q != "num" && q != "atm" && q != "term")
            deps_[name].insert(q);
        }
        constraints[args[0]->name].push_back(ty);
      }
      alts.push_back(skeleton(c.head->args[0], constraints, exact));
    }
    bool lossy = false;
    alts = determinize(tt, alts, lossy);
    if (lossy) exact = false;
    tt.define(slot, tt.union_of(alts));
    exact_[name] = exact;
    return slot;
  }

  bool exact_walk(const std::string& name, std::set<std::string>& visiting) const {
    auto it = exact_.find(name);
    if (it == exact_.end()) return false;
    if (!it->second) return false;
    if (!visiting.insert(name).second) return true;
    auto dit = deps_.find(name);
    if (dit != deps_.end())
      for (const auto& d : dit->second)
        if (!exact_walk(d, visiting)) return false;
    return true;
  }
};

// ---- text form ----
//
//   (A:list(int),B:term)     or     bot
//
// Named types print by name; the accompanying typedef lines make a dump
// self-contained.
inline std::string text(const TypeTable& tt, const AbstractSubst& a) {
  if (a.bot) return "bot";
  std::string s = "(";
  bool first = true;
  for (const auto& v : a.vars) {
    if (!first) s += ",";
    first = false;
    s += v + ":" + tt.display_text(a.ty.at(v));
  }
  s += ")";
  return s;
}

inline AbstractSubst parse(TypeTable& tt, const std::vector<std::string>& vars,
                           const std::string& text) {
  auto fail = [&text](const std::string& why) {
    throw std::runtime_error("bad shapes element '" + text + "': " + why);
  };
  if (text == "bot") return bottom_elem(DomainId::Shapes, vars);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    fail("expected parentheses");
  AbstractSubst a;
  a.dom = DomainId::Shapes;
  a.vars = vars;
  // split on commas at depth zero; quoted atoms may hide commas
  std::string body = text.substr(1, text.size() - 2);
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (quoted) {
      cur += c;
      if (c == '\'') quoted = false;
      continue;
    }
    if (c == '\'') quoted = true;
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (!cur.empty() || !parts.empty()) parts.push_back(cur);
  for (const auto& part : parts) {
    auto colon = part.find(':');
    if (colon == std::string::npos) fail("missing ':' in " + part);
    std::string v = part.substr(0, colon);
    a.ty[v] = parse_type_text(tt, part.substr(colon + 1));
  }
  for (const auto& v : vars)
    if (!a.ty.count(v)) fail("missing variable " + v);
  if (a.ty.size() != vars.size()) fail("extra variables");
  return a;
}

} // namespace shapes
} // namespace semsearch
