#pragma once

// Interprets assertion property formulas as abstract elements.  A formula
// in an assertion is a disjunction of conjunctions of property literals
// (var/1, ground/1, int/1, list/1, list/2, user regtypes, ...).
//
// For each conjunction we produce an over-approximation of the described
// substitution set and, when the description is provably exact in the
// domain, the matching under-approximation.  Proofs of "checked" need
// unders; proofs of "false" need overs; anything uncertified stays check.

#include "domain.hpp"
#include "program.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semsearch {

struct PropError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropEnv {
  const ModuleMap* mods = nullptr;
  const Module* target = nullptr;          // module under analysis / search
  const Module* query = nullptr;           // query-shipped definitions
  shapes::TypeBinder* binder = nullptr;    // required for shapes
};

struct AbsProp {
  AbstractSubst over;
  std::optional<AbstractSubst> under; // present only when certified exact
  bool exact = false;
};

namespace detail {

inline bool user_prop_known(const PropEnv& env, const std::string& name,
                            std::size_t arity) {
  auto usable = [&](const Module* m) {
    if (!m) return false;
    const PredDef* d = m->find_pred(name, arity);
    return d && (d->is_prop || d->is_regtype);
  };
  if (usable(env.query) || usable(env.target)) return true;
  if (env.target && env.mods)
    for (const auto& imp : env.target->imports) {
      const Module* m = find_module(*env.mods, imp);
      if (m && m->is_exported(name, arity) && usable(m)) return true;
    }
  return false;
}

inline void unknown_prop(const std::string& name, std::size_t arity) {
  throw PropError("unknown property " + name + "/" + std::to_string(arity));
}

inline AbsProp conj_shfr(const PropEnv& env,
                         const std::vector<std::string>& vars,
                         const PropConj& conj) {
  VarSet scope(vars.begin(), vars.end());
  VarSet freev, groundv;
  bool exact = true;
  bool bottomed = false;

  auto ground_term = [&](const TermPtr& t) {
    for (const auto& v : term_vars(t))
      if (scope.count(v)) groundv.insert(v);
  };

  for (const auto& lit : conj) {
    const std::string& p = lit->name;
    const auto& args = lit->args;
    for (const auto& a : args)
      for (const auto& v : term_vars(a))
        if (!scope.count(v)) exact = false; // local constraint: projected away
    if (args.size() == 1) {
      const TermPtr& a = args[0];
      if (p == "var") {
        if (a->is_var()) {
          if (scope.count(a->name)) freev.insert(a->name);
        } else {
          bottomed = true; // var(f(..)) never holds
        }
      } else if (p == "ground") {
        ground_term(a);
      } else if (p == "term") {
        // no constraint
      } else if (p == "int" || p == "num") {
        if (a->is_var()) {
          if (scope.count(a->name)) groundv.insert(a->name);
          exact = false; // groundness is implied but not the full story
        } else if (a->is_int()) {
          // always true
        } else {
          bottomed = true;
        }
      } else if (p == "atm") {
        if (a->is_var()) {
          if (scope.count(a->name)) groundv.insert(a->name);
          exact = false;
        } else if (a->is_atom()) {
          // always true
        } else {
          bottomed = true;
        }
      } else if (p == "list") {
        exact = false; // no sharing/freeness content expressible
      } else {
        if (!user_prop_known(env, p, 1)) unknown_prop(p, 1);
        exact = false;
      }
    } else if (p == "list" && args.size() == 2) {
      exact = false;
    } else {
      if (!user_prop_known(env, p, args.size())) unknown_prop(p, args.size());
      exact = false;
    }
  }

  AbsProp r;
  for (const auto& v : freev)
    if (groundv.count(v)) bottomed = true; // free-and-ground is absurd

  if (bottomed) {
    r.over = bottom_elem(DomainId::Shfr, vars);
    r.exact = true; // the described set is empty, exactly
    r.under = r.over;
    return r;
  }

  // widest sharing among the not-ground variables, stated freeness kept
  std::vector<std::string> unground;
  for (const auto& v : vars)
    if (!groundv.count(v)) unground.push_back(v);
  r.over.dom = DomainId::Shfr;
  r.over.vars = vars;
  r.over.sharing = shfr::top(unground).sharing;
  r.over.free = freev;
  r.exact = exact;
  if (exact) r.under = r.over;
  return r;
}

inline AbsProp conj_shapes(const PropEnv& env,
                           const std::vector<std::string>& vars,
                           const PropConj& conj) {
  shapes::TypeBinder& binder = *env.binder;
  TypeTable& tt = binder.tt;
  VarSet scope(vars.begin(), vars.end());

  AbstractSubst elem = shapes::top(tt, vars);
  bool exact = true;
  bool bottomed = false;

  // narrow a variable, keeping track of whether the intersection is exact
  auto narrow = [&](const std::string& v, int ty) {
    int old = elem.ty.at(v);
    if (!tt.leq(old, ty) && !tt.leq(ty, old)) exact = false;
    int nt = tt.glb(old, ty);
    if (nt == tt.bot()) bottomed = true;
    elem.ty[v] = nt;
  };

  // type of a closed (variable-free) term
  std::function<int(const TermPtr&)> closed_type = [&](const TermPtr& t) {
    std::vector<int> kids;
    for (const auto& a : t->args) kids.push_back(closed_type(a));
    return tt.cons(t->name, std::move(kids));
  };

  auto apply_type = [&](const TermPtr& a, int ty, bool ty_exact) {
    if (a->is_var()) {
      if (scope.count(a->name)) {
        if (!ty_exact) exact = false;
        narrow(a->name, ty);
      } else {
        exact = false; // constraint on a local variable: projected away
      }
    } else if (term_vars(a).empty()) {
      if (tt.glb(closed_type(a), ty) == tt.bot()) bottomed = true;
      // a closed term either satisfies the type or not; either way exact
    } else {
      exact = false; // structured argument with variables: not tracked
    }
  };

  for (const auto& lit : conj) {
    const std::string& p = lit->name;
    const auto& args = lit->args;
    if (args.size() == 1) {
      int ty = 0;
      bool ty_exact = false;
      auto shape = binder.prop_type(p, ty, ty_exact);
      switch (shape) {
      case shapes::TypeBinder::PropShape::Type:
        apply_type(args[0], ty, ty_exact);
        break;
      case shapes::TypeBinder::PropShape::NoInfo:
        exact = false; // var/ground carry no shape content
        break;
      case shapes::TypeBinder::PropShape::Unknown:
        unknown_prop(p, 1);
      }
    } else if (p == "list" && args.size() == 2) {
      if (!args[1]->is_atom()) {
        exact = false;
        continue;
      }
      int ety = 0;
      bool ety_exact = false;
      auto shape = binder.prop_type(args[1]->name, ety, ety_exact);
      if (shape == shapes::TypeBinder::PropShape::Unknown)
        unknown_prop(args[1]->name, 1);
      if (shape == shapes::TypeBinder::PropShape::NoInfo) {
        ety = tt.top();
        ety_exact = false;
      }
      apply_type(args[0], tt.list_of(ety), ety_exact);
    } else {
      if (!user_prop_known(env, p, args.size())) unknown_prop(p, args.size());
      exact = false;
    }
  }

  AbsProp r;
  if (bottomed) {
    r.over = bottom_elem(DomainId::Shapes, vars);
    r.exact = true;
    r.under = r.over;
    return r;
  }
  r.over = elem;
  r.exact = exact;
  if (exact) r.under = r.over;
  return r;
}

} // namespace detail

inline AbsProp abstract_prop(const Dom& dom, const PropEnv& env,
                             const std::vector<std::string>& vars,
                             const PropConj& conj) {
  return dom.id == DomainId::Shfr ? detail::conj_shfr(env, vars, conj)
                                  : detail::conj_shapes(env, vars, conj);
}

// A whole formula (DNF).  `over` joins the disjunct overs; unders stay per
// disjunct:  an element below any single disjunct's under provably lies in
// the described set, while the joined under is only certified when the join
// itself is exact.
struct TsResult {
  AbstractSubst over;
  std::vector<std::optional<AbstractSubst>> unders;
  std::optional<AbstractSubst> under_joined;
};

inline TsResult ts(const Dom& dom, const PropEnv& env,
                   const std::vector<std::string>& vars,
                   const PropFormula& formula) {
  TsResult r;
  if (formula.empty()) { // an absent formula means "true"
    r.over = dom.top(vars);
    r.unders.push_back(r.over);
    r.under_joined = r.over;
    return r;
  }
  r.over = dom.bottom(vars);
  bool all_exact = true;
  for (const auto& conj : formula) {
    AbsProp p = abstract_prop(dom, env, vars, conj);
    r.over = dom.lub(r.over, p.over);
    r.unders.push_back(p.under);
    all_exact &= p.exact;
  }
  if (all_exact) {
    AbstractSubst joined = dom.bottom(vars);
    bool exact_join = true;
    for (const auto& u : r.unders) {
      bool step = false;
      joined = dom.lub_exact(joined, *u, step);
      exact_join &= step;
    }
    if (exact_join) r.under_joined = joined;
  }
  return r;
}

inline bool covered_by_under(const Dom& dom, const AbstractSubst& elem,
                             const TsResult& t) {
  for (const auto& u : t.unders)
    if (u && dom.leq(elem, *u)) return true;
  return false;
}

} // namespace semsearch
