#pragma once

// Sharing+freeness domain.  An element records which sets of variables may
// be bound to terms with a variable in common (sharing groups) and which
// variables are definitely still unbound (free).  A variable in no group is
// ground.  Top is "all non-empty groups, nothing known free".
//
// The abstract unification follows the classic scheme: only groups relevant
// to either side are combined, with star-closure skipped when one side is
// known free (a free variable cannot duplicate bindings).

#include "abstract.hpp"
#include "term.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace semsearch {
namespace shfr {

inline AbstractSubst top(const std::vector<std::string>& vars) {
  AbstractSubst a;
  a.dom = DomainId::Shfr;
  a.vars = vars;
  // all non-empty subsets of vars
  std::size_t n = vars.size();
  if (n > 20) throw std::logic_error("shfr: too many variables for top");
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::set<std::string> g;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) g.insert(vars[i]);
    a.sharing.insert(std::move(g));
  }
  return a;
}

inline AbstractSubst empty(const std::vector<std::string>& vars) {
  // no groups, nothing free: every variable ground
  AbstractSubst a;
  a.dom = DomainId::Shfr;
  a.vars = vars;
  return a;
}

inline VarSet ground_vars(const AbstractSubst& a) {
  VarSet g(a.vars.begin(), a.vars.end());
  for (const auto& grp : a.sharing)
    for (const auto& v : grp) g.erase(v);
  return g;
}

inline bool leq(const AbstractSubst& a, const AbstractSubst& b) {
  if (a.bot) return true;
  if (b.bot) return false;
  return std::includes(b.sharing.begin(), b.sharing.end(),
                       a.sharing.begin(), a.sharing.end()) &&
         std::includes(a.free.begin(), a.free.end(),
                       b.free.begin(), b.free.end());
}

inline bool equal(const AbstractSubst& a, const AbstractSubst& b) {
  if (a.bot || b.bot) return a.bot == b.bot;
  return a.sharing == b.sharing && a.free == b.free;
}

inline AbstractSubst lub(const AbstractSubst& a, const AbstractSubst& b) {
  if (a.bot) return b;
  if (b.bot) return a;
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.vars = a.vars;
  std::set_union(a.sharing.begin(), a.sharing.end(), b.sharing.begin(),
                 b.sharing.end(), std::inserter(r.sharing, r.sharing.end()));
  std::set_intersection(a.free.begin(), a.free.end(), b.free.begin(),
                        b.free.end(), std::inserter(r.free, r.free.end()));
  return r;
}

// exact flags whether the join introduced no extra descriptions, i.e. the
// concretization of the result is the union of the operands'.
inline AbstractSubst lub_exact(const AbstractSubst& a, const AbstractSubst& b,
                               bool& exact) {
  exact = leq(a, b) || leq(b, a);
  return lub(a, b);
}

inline AbstractSubst glb(const AbstractSubst& a, const AbstractSubst& b) {
  if (a.bot) return a;
  if (b.bot) return b;
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.vars = a.vars;
  std::set_intersection(a.sharing.begin(), a.sharing.end(), b.sharing.begin(),
                        b.sharing.end(),
                        std::inserter(r.sharing, r.sharing.end()));
  std::set_union(a.free.begin(), a.free.end(), b.free.begin(), b.free.end(),
                 std::inserter(r.free, r.free.end()));
  // a free variable occurs in its own binding, so free-and-ground is absurd
  VarSet grounded = ground_vars(r);
  for (const auto& v : r.free)
    if (grounded.count(v)) return bottom_elem(DomainId::Shfr, a.vars);
  return r;
}

inline AbstractSubst widen(const AbstractSubst& prev, const AbstractSubst& next) {
  return lub(prev, next); // finite lattice per variable set: lub terminates
}

// ---- abstract unification ----

namespace detail {

inline SharingSet star(const SharingSet& s) {
  SharingSet r = s;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::set<std::string>> pending;
    for (auto i = r.begin(); i != r.end(); ++i)
      for (auto j = std::next(i); j != r.end(); ++j) {
        std::set<std::string> u = *i;
        u.insert(j->begin(), j->end());
        if (!r.count(u)) pending.push_back(std::move(u));
      }
    for (auto& u : pending)
      changed |= r.insert(std::move(u)).second;
  }
  return r;
}

inline SharingSet bin(const SharingSet& a, const SharingSet& b) {
  SharingSet r;
  for (const auto& x : a)
    for (const auto& y : b) {
      std::set<std::string> u = x;
      u.insert(y.begin(), y.end());
      r.insert(std::move(u));
    }
  return r;
}

inline VarSet union_of(const SharingSet& s) {
  VarSet r;
  for (const auto& g : s) r.insert(g.begin(), g.end());
  return r;
}

inline AbstractSubst amgu_var(AbstractSubst a, const std::string& x,
                              const TermPtr& t) {
  auto tvl = term_vars(t);
  VarSet tv(tvl.begin(), tvl.end());
  if (!t->is_var() && tv.count(x)) // occurs check: x = f(..x..) never succeeds
    return bottom_elem(DomainId::Shfr, a.vars);

  SharingSet relx, relt, rest;
  for (const auto& g : a.sharing) {
    bool in_x = g.count(x) != 0;
    bool in_t = false;
    for (const auto& v : tv)
      if (g.count(v)) { in_t = true; break; }
    if (in_x) relx.insert(g);
    if (in_t) relt.insert(g);
    if (!in_x && !in_t) rest.insert(g);
  }

  bool free_x = a.free.count(x) != 0;
  bool free_t = t->is_var() && a.free.count(t->name) != 0;

  SharingSet b = (free_x || free_t) ? bin(relx, relt)
                                    : bin(star(relx), star(relt));
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.vars = a.vars;
  r.sharing = rest;
  r.sharing.insert(b.begin(), b.end());

  r.free = a.free;
  if (free_x && free_t) {
    // var-var binding of two free variables keeps everything free
  } else if (free_x) {
    for (const auto& v : union_of(relx)) r.free.erase(v);
  } else if (free_t) {
    for (const auto& v : union_of(relt)) r.free.erase(v);
  } else {
    for (const auto& v : union_of(relx)) r.free.erase(v);
    for (const auto& v : union_of(relt)) r.free.erase(v);
  }
  return r;
}

} // namespace detail

inline AbstractSubst amgu(const AbstractSubst& a, const TermPtr& lhs,
                          const TermPtr& rhs) {
  if (a.bot) return a;
  if (lhs->is_var()) return detail::amgu_var(a, lhs->name, rhs);
  if (rhs->is_var()) return detail::amgu_var(a, rhs->name, lhs);
  // both structured (constants included): functor clash cannot succeed
  if (lhs->name != rhs->name || lhs->args.size() != rhs->args.size())
    return bottom_elem(DomainId::Shfr, a.vars);
  AbstractSubst cur = a;
  for (std::size_t i = 0; i < lhs->args.size(); ++i) {
    cur = amgu(cur, lhs->args[i], rhs->args[i]);
    if (cur.bot) return cur;
  }
  return cur;
}

// ---- variable bookkeeping ----

inline AbstractSubst extend(const AbstractSubst& a,
                            const std::vector<std::string>& fresh) {
  AbstractSubst r = a;
  for (const auto& v : fresh) {
    if (r.has_var(v)) continue;
    r.vars.push_back(v);
    if (!r.bot) {
      r.sharing.insert(std::set<std::string>{v});
      r.free.insert(v);
    }
  }
  return r;
}

inline AbstractSubst project(const AbstractSubst& a,
                             const std::vector<std::string>& keep) {
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.vars = keep;
  r.bot = a.bot;
  if (a.bot) return r;
  VarSet ks(keep.begin(), keep.end());
  for (const auto& g : a.sharing) {
    std::set<std::string> p;
    for (const auto& v : g)
      if (ks.count(v)) p.insert(v);
    if (!p.empty()) r.sharing.insert(std::move(p));
  }
  for (const auto& v : a.free)
    if (ks.count(v)) r.free.insert(v);
  return r;
}

inline AbstractSubst rename(const AbstractSubst& a,
                            const std::map<std::string, std::string>& m) {
  auto nm = [&m](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.bot = a.bot;
  for (const auto& v : a.vars) r.vars.push_back(nm(v));
  for (const auto& g : a.sharing) {
    std::set<std::string> gg;
    for (const auto& v : g) gg.insert(nm(v));
    r.sharing.insert(std::move(gg));
  }
  for (const auto& v : a.free) r.free.insert(nm(v));
  return r;
}

// ---- call/success combination ----
//
// Given the description at a call, the call's argument terms, and the
// callee's success description over its formal parameters, compute the
// description after the call returns.  The formals are brought in under
// reserved names, unified with the actuals, then the sharing is filtered
// against the success description and the formals are dropped again.
inline AbstractSubst apply_call_success(const AbstractSubst& call,
                                        const std::vector<TermPtr>& actuals,
                                        const AbstractSubst& succ) {
  if (call.bot) return call;
  if (succ.bot) return bottom_elem(DomainId::Shfr, call.vars);
  if (succ.vars.size() != actuals.size())
    throw std::logic_error("shfr: arity mismatch in call/success combination");

  std::map<std::string, std::string> to_fresh;
  std::vector<std::string> formals;
  for (std::size_t i = 0; i < succ.vars.size(); ++i) {
    std::string f = "$a" + std::to_string(i);
    to_fresh[succ.vars[i]] = f;
    formals.push_back(f);
  }
  AbstractSubst s = rename(succ, to_fresh);
  VarSet fs(formals.begin(), formals.end());

  AbstractSubst cur = extend(call, formals);
  for (std::size_t i = 0; i < formals.size(); ++i) {
    cur = amgu(cur, make_var(formals[i]), actuals[i]);
    if (cur.bot) return project(cur, call.vars);
  }

  // close groups that touch formals: unification through the call can
  // combine any of them
  SharingSet touching, rest;
  for (const auto& g : cur.sharing) {
    bool t = false;
    for (const auto& v : g)
      if (fs.count(v)) { t = true; break; }
    (t ? touching : rest).insert(g);
  }
  SharingSet closed = detail::star(touching);

  // keep only groups whose formal part is possible on success
  AbstractSubst r;
  r.dom = DomainId::Shfr;
  r.vars = cur.vars;
  r.sharing = rest;
  for (const auto& g : closed) {
    std::set<std::string> fpart;
    for (const auto& v : g)
      if (fs.count(v)) fpart.insert(v);
    if (s.sharing.count(fpart)) r.sharing.insert(g);
  }

  // a variable stays free only if it still has a sharing group (a free
  // variable always shares with itself; losing every group means it was
  // bound to something ground) and every group that could link it into the
  // call -- dropped ones included, those are the runs where the callee
  // reached it -- kept all its formals free on success
  VarSet grounded = ground_vars(r);
  for (const auto& v : cur.free) {
    if (grounded.count(v)) continue;
    bool ok = true;
    for (const auto& g : closed) {
      if (!g.count(v)) continue;
      std::set<std::string> fpart;
      for (const auto& w : g)
        if (fs.count(w)) fpart.insert(w);
      if (!std::includes(s.free.begin(), s.free.end(), fpart.begin(),
                         fpart.end())) {
        ok = false;
        break;
      }
    }
    if (ok) r.free.insert(v);
  }

  return project(r, call.vars);
}

// ---- text form ----
//
//   (mshare([[A],[A,B]]),var(A),ground(C))     or     bot
//
// Compact (no spaces) so a dump line can be split on blanks.  Groups list
// in set order; var/ground facts follow the element's variable order.
inline std::string text(const AbstractSubst& a) {
  if (a.bot) return "bot";
  std::string s = "(mshare([";
  bool firstg = true;
  for (const auto& g : a.sharing) {
    if (!firstg) s += ",";
    firstg = false;
    s += "[";
    bool firstv = true;
    for (const auto& v : g) {
      if (!firstv) s += ",";
      firstv = false;
      s += v;
    }
    s += "]";
  }
  s += "])";
  VarSet grounded = ground_vars(a);
  for (const auto& v : a.vars)
    if (a.free.count(v)) s += ",var(" + v + ")";
  for (const auto& v : a.vars)
    if (grounded.count(v)) s += ",ground(" + v + ")";
  s += ")";
  return s;
}

// Parses the text form back.  `vars` gives the element's variable order;
// ground facts are accepted and checked but groups alone determine them.
inline AbstractSubst parse(const std::vector<std::string>& vars,
                           const std::string& text) {
  auto fail = [&text](const std::string& why) {
    throw std::runtime_error("bad shfr element '" + text + "': " + why);
  };
  if (text == "bot") return bottom_elem(DomainId::Shfr, vars);
  AbstractSubst a;
  a.dom = DomainId::Shfr;
  a.vars = vars;
  VarSet known(vars.begin(), vars.end());
  std::size_t p = 0;
  auto eat = [&](const std::string& tok) {
    if (text.compare(p, tok.size(), tok) != 0) fail("expected '" + tok + "'");
    p += tok.size();
  };
  auto ident = [&]() {
    std::size_t q = p;
    while (q < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[q])) || text[q] == '_'))
      ++q;
    if (q == p) fail("expected a variable name");
    std::string v = text.substr(p, q - p);
    p = q;
    if (!known.count(v)) fail("unknown variable " + v);
    return v;
  };
  eat("(mshare([");
  if (text[p] != ']') {
    while (true) {
      eat("[");
      std::set<std::string> g;
      while (true) {
        g.insert(ident());
        if (text[p] == ',') { ++p; continue; }
        break;
      }
      eat("]");
      a.sharing.insert(std::move(g));
      if (text[p] == ',') { ++p; continue; }
      break;
    }
  }
  eat("])");
  while (p < text.size() && text[p] == ',') {
    ++p;
    if (text.compare(p, 4, "var(") == 0) {
      p += 4;
      a.free.insert(ident());
      eat(")");
    } else if (text.compare(p, 7, "ground(") == 0) {
      p += 7;
      std::string v = ident();
      eat(")");
      for (const auto& g : a.sharing)
        if (g.count(v)) fail(v + " marked ground but shares");
    } else {
      fail("expected var(..) or ground(..)");
    }
  }
  eat(")");
  if (p != text.size()) fail("trailing characters");
  return a;
}

} // namespace shfr
} // namespace semsearch
