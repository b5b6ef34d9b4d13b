#pragma once

// Goal-dependent abstract interpretation of one module.
//
// Analysis entries come from the module's own call assertions (one per
// precondition disjunct of an exported predicate, Top when it has none).
// Each distinct abstract call to a predicate gets its own variant (bounded
// multivariance); a variant's success starts at bottom — meaning "fails or
// loops" — and rises as clause bodies are re-walked until nothing changes.
// Calls to imported predicates are not analyzed: the first of the callee's
// assertions whose precondition covers the abstract call supplies a trusted
// success description (Top when none does).
//
// In the shape domain a variant's success is held in named type slots, one
// per argument, so recursive predicates converge on grammar-style types
// ([]|[term|self]) instead of ever-deeper unions.

#include "normalize.hpp"
#include "props.hpp"

#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace semsearch {

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalysisDiverged : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct Triple {
  PredId pred;
  int variant = 0;
  AbstractSubst call; // over canonical argument names A, B, ...
  AbstractSubst succ; // bottom = the call finitely fails or loops
};

struct AnalysisOptions {
  int variant_cap = 8;     // per-predicate call variants before merging
  long max_steps = 200000; // node evaluations before giving up
};

// An extra forced entry: analyze `pred` as if called with `pre`.
struct EntrySpec {
  PredId pred;
  PropFormula pre;
};

struct AnalysisResult {
  std::string module;
  DomainId domain = DomainId::Shfr;
  std::shared_ptr<TypeTable> types; // shapes elements index into this
  std::vector<std::pair<PredId, AbstractSubst>> entries;
  std::vector<Triple> triples;
  std::vector<std::pair<std::string, std::string>> typedefs; // name, body
  long steps = 0;

  std::vector<const Triple*> triples_for(const std::string& name,
                                         std::size_t arity) const {
    std::vector<const Triple*> out;
    for (const auto& t : triples)
      if (t.pred.name == name && t.pred.arity == arity) out.push_back(&t);
    return out;
  }
};

inline std::vector<std::string> canon_vars(std::size_t arity) {
  std::vector<std::string> vs;
  for (std::size_t i = 0; i < arity; ++i) vs.push_back(canonical_arg_name(i));
  return vs;
}

class Analyzer {
public:
  Analyzer(const ModuleMap& mods, const Module& target, DomainId domain,
           AnalysisOptions opts = {}, const Module* querydefs = nullptr)
      : mods_(mods), target_(target), opts_(opts),
        tt_(std::make_shared<TypeTable>()), binder_(*tt_),
        dom_(domain, tt_.get()) {
    binder_.mods = &mods_;
    binder_.target = &target_;
    binder_.query = querydefs;
    env_.mods = &mods_;
    env_.target = &target_;
    env_.query = querydefs;
    env_.binder = &binder_;
    if (domain == DomainId::Shapes) {
      binder_.declare_module_types();
      binder_.declare_query_types();
    }
    for (const auto& p : target_.preds)
      norm_.emplace(std::pair<std::string, std::size_t>{p.name, p.arity},
                    normalize_pred(p));
  }

  // One entry per precondition disjunct of each exported predicate with
  // call assertions; a single Top entry otherwise.
  void derive_default_entries() {
    for (const auto& [name, arity] : target_.exported_preds()) {
      const PredDef* def = target_.find_pred(name, arity);
      if (!def || def->clauses.empty()) continue; // trusted export: no code
      auto asserts = target_.pred_assertions(name, arity);
      PredId pid{target_.name, name, arity};
      if (asserts.empty()) {
        add_entry(pid, dom_.top(canon_vars(arity)));
        continue;
      }
      for (const Assertion* as : asserts) {
        if (as->pre.empty()) {
          add_entry(pid, dom_.top(canon_vars(arity)));
          continue;
        }
        for (const auto& conj : as->pre) {
          AbsProp p = abstract_prop(dom_, env_, as->head_vars, conj);
          add_entry(pid, to_canon(p.over, as->head_vars));
        }
      }
    }
  }

  void add_entry_formula(const PredId& pred, const PropFormula& pre) {
    TsResult t = ts(dom_, env_, canon_vars(pred.arity), pre);
    add_entry(pred, t.over);
  }

  AnalysisResult run() {
    for (const auto& [pred, elem] : entry_list_) node_for(pred, elem, -1);
    while (!queue_.empty()) {
      int id = queue_.front();
      queue_.pop_front();
      queued_.erase(id);
      if (++steps_ > opts_.max_steps)
        throw AnalysisDiverged("analysis did not stabilize within " +
                               std::to_string(opts_.max_steps) + " steps");
      process(id);
    }
    return finalize();
  }

private:
  struct Node {
    PredId pred;
    int variant = 0;
    bool is_overflow = false;
    AbstractSubst call;
    AbstractSubst succ;     // shfr only
    std::vector<int> slots; // shapes: one named success slot per argument
    std::set<int> deps;     // nodes to re-walk when this success changes
  };

  const ModuleMap& mods_;
  const Module& target_;
  AnalysisOptions opts_;
  std::shared_ptr<TypeTable> tt_;
  shapes::TypeBinder binder_;
  Dom dom_;
  PropEnv env_;
  std::map<std::pair<std::string, std::size_t>, PredDef> norm_;
  std::vector<std::pair<PredId, AbstractSubst>> entry_list_;

  std::deque<Node> nodes_;
  std::map<std::pair<std::string, std::size_t>, std::vector<int>> variants_;
  std::deque<int> queue_;
  std::set<int> queued_;
  long steps_ = 0;

  AbstractSubst to_canon(const AbstractSubst& a,
                         const std::vector<std::string>& head_vars) const {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < head_vars.size(); ++i)
      m[head_vars[i]] = canonical_arg_name(i);
    return dom_.rename(a, m);
  }

  void add_entry(const PredId& pred, const AbstractSubst& elem) {
    for (const auto& [p, e] : entry_list_)
      if (p == pred && dom_.equal(e, elem)) return;
    entry_list_.emplace_back(pred, elem);
  }

  void enqueue(int id) {
    if (queued_.insert(id).second) queue_.push_back(id);
  }

  AbstractSubst succ_elem(const Node& n) const {
    if (dom_.id == DomainId::Shfr) return n.succ;
    AbstractSubst s;
    s.dom = DomainId::Shapes;
    s.vars = canon_vars(n.pred.arity);
    for (std::size_t i = 0; i < s.vars.size(); ++i) {
      if (tt_->resolve(n.slots[i]) == tt_->bot())
        return bottom_elem(DomainId::Shapes, s.vars);
      s.ty[s.vars[i]] = n.slots[i];
    }
    return s;
  }

  int node_for(const PredId& pred, const AbstractSubst& call, int requester) {
    auto key = std::pair<std::string, std::size_t>{pred.name, pred.arity};
    auto& vs = variants_[key];
    for (int id : vs)
      if (dom_.equal(nodes_[id].call, call)) {
        if (requester >= 0) nodes_[id].deps.insert(requester);
        return id;
      }
    if (static_cast<int>(vs.size()) > opts_.variant_cap)
      throw std::logic_error("variant bookkeeping out of bounds");
    if (static_cast<int>(vs.size()) == opts_.variant_cap) {
      // merge further patterns into one widened overflow variant
      int id;
      if (!nodes_[vs.back()].is_overflow) {
        id = new_node(pred, static_cast<int>(vs.size()), call, true);
        vs.push_back(id);
      } else {
        id = vs.back();
        AbstractSubst widened = dom_.widen(nodes_[id].call, call);
        if (!dom_.equal(widened, nodes_[id].call)) {
          nodes_[id].call = widened;
          reset_success(nodes_[id]);
          enqueue(id);
          for (int d : nodes_[id].deps) enqueue(d);
        }
      }
      if (requester >= 0) nodes_[id].deps.insert(requester);
      return id;
    }
    int id = new_node(pred, static_cast<int>(vs.size()), call, false);
    vs.push_back(id);
    if (requester >= 0) nodes_[id].deps.insert(requester);
    return id;
  }

  int new_node(const PredId& pred, int variant, const AbstractSubst& call,
               bool overflow) {
    Node n;
    n.pred = pred;
    n.variant = variant;
    n.is_overflow = overflow;
    n.call = call;
    n.succ = dom_.bottom(canon_vars(pred.arity));
    if (dom_.id == DomainId::Shapes)
      for (std::size_t i = 0; i < pred.arity; ++i)
        n.slots.push_back(tt_->alloc_anon());
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size()) - 1;
    enqueue(id);
    return id;
  }

  void reset_success(Node& n) {
    n.succ = dom_.bottom(canon_vars(n.pred.arity));
    if (dom_.id == DomainId::Shapes)
      for (int s : n.slots) tt_->define(s, tt_->bot());
  }

  void process(int id) {
    PredId pred = nodes_[id].pred;
    auto cv = canon_vars(pred.arity);
    const PredDef& def = norm_.at({pred.name, pred.arity});

    AbstractSubst contrib = dom_.bottom(cv);
    for (const auto& clause : def.clauses) {
      AbstractSubst elem = nodes_[id].call;
      elem = dom_.extend(elem, clause_vars(clause));
      elem = walk_body(clause.body, elem, id);
      if (elem.bot) continue;
      if (dom_.id == DomainId::Shapes) {
        // second pass over the head bindings: variables narrowed later in
        // the body flow back into the head argument shapes
        for (const auto& g : clause.body.goals) {
          if (g.kind != Goal::Kind::Unif) break;
          elem = dom_.amgu(elem, g.lhs, g.rhs);
          if (elem.bot) break;
        }
        if (elem.bot) continue;
      }
      contrib = dom_.lub(contrib, dom_.project(elem, cv));
    }

    bool changed = false;
    if (dom_.id == DomainId::Shfr) {
      AbstractSubst widened = dom_.widen(nodes_[id].succ, contrib);
      changed = !dom_.equal(widened, nodes_[id].succ);
      nodes_[id].succ = std::move(widened);
    } else if (!contrib.bot) {
      for (std::size_t i = 0; i < cv.size(); ++i)
        changed |= widen_slot(nodes_[id].slots[i], contrib.ty.at(cv[i]));
    }
    if (changed)
      for (int d : nodes_[id].deps) enqueue(d);
  }

  bool widen_slot(int slot, int ty) {
    int cur = tt_->at(slot).kids[0];
    int u = cur == tt_->bot() ? ty : tt_->union_of({cur, ty});
    int c = shapes::canonicalize(*tt_, u);
    if (tt_->equal(slot, c)) return false;
    tt_->define(slot, c);
    return true;
  }

  AbstractSubst walk_body(const Body& body, AbstractSubst elem, int node_id) {
    for (const auto& g : body.goals) {
      if (elem.bot) return elem;
      switch (g.kind) {
      case Goal::Kind::Unif:
        elem = dom_.amgu(elem, g.lhs, g.rhs);
        break;
      case Goal::Kind::Disj: {
        AbstractSubst acc = dom_.bottom(elem.vars);
        for (const auto& br : g.branches)
          acc = dom_.lub(acc, walk_body(br, elem, node_id));
        elem = std::move(acc);
        break;
      }
      case Goal::Kind::Call:
        elem = walk_call(g, elem, node_id);
        break;
      }
    }
    return elem;
  }

  // grounds every variable of `t` in a sharing element
  static void shfr_ground_term(AbstractSubst& a, const TermPtr& t) {
    for (const auto& v : term_vars(t)) {
      for (auto it = a.sharing.begin(); it != a.sharing.end();)
        it = it->count(v) ? a.sharing.erase(it) : std::next(it);
      a.free.erase(v);
    }
  }

  AbstractSubst walk_call(const Goal& g, AbstractSubst elem, int node_id) {
    const std::string& name = g.callee->name;
    const auto& args = g.callee->args;
    std::size_t arity = args.size();

    // built-ins
    if (name == "true" && arity == 0) return elem;
    if (name == "=" && arity == 2) return dom_.amgu(elem, args[0], args[1]);
    if (name == "succ" && arity == 2) {
      // integer successor: both arguments are integers on success
      if (dom_.id == DomainId::Shfr) {
        shfr_ground_term(elem, args[0]);
        shfr_ground_term(elem, args[1]);
        return elem;
      }
      AbstractSubst r = elem;
      if (!shapes::constrain(*tt_, r, args[0], tt_->t_int()) ||
          !shapes::constrain(*tt_, r, args[1], tt_->t_int()))
        return bottom_elem(DomainId::Shapes, elem.vars);
      return r;
    }
    if (name == "functor" && arity == 3) {
      // functor(T, F, A): on success T is bound, F and A are ground
      if (dom_.id == DomainId::Shfr) {
        shfr_ground_term(elem, args[1]);
        shfr_ground_term(elem, args[2]);
        if (args[0]->is_var()) elem.free.erase(args[0]->name);
        return elem;
      }
      return elem; // no shape information
    }

    auto [m, def] = resolve_pred(mods_, target_, name, arity);
    if (!m)
      throw AnalysisError("unknown predicate " + name + "/" +
                          std::to_string(arity) + " in module " + target_.name);

    AbstractSubst callee_call = abstract_call(elem, args);
    if (callee_call.bot) return bottom_elem(dom_.id, elem.vars);

    if (m == &target_ && def && !def->clauses.empty()) {
      PredId pid{target_.name, name, arity};
      int child = node_for(pid, callee_call, node_id);
      AbstractSubst succ = succ_elem(nodes_[child]);
      if (succ.bot) // fails or loops so far; we re-run if that improves
        return bottom_elem(dom_.id, elem.vars);
      return dom_.apply_call_success(elem, args, succ);
    }

    AbstractSubst desc = trusted_success(*m, name, arity, callee_call);
    return dom_.apply_call_success(elem, args, desc);
  }

  // the abstract call pattern: actual argument terms projected onto the
  // callee's formal parameters
  AbstractSubst abstract_call(const AbstractSubst& elem,
                              const std::vector<TermPtr>& args) {
    std::vector<std::string> formals;
    for (std::size_t i = 0; i < args.size(); ++i)
      formals.push_back("$a" + std::to_string(i));
    AbstractSubst e = dom_.extend(elem, formals);
    for (std::size_t i = 0; i < args.size(); ++i) {
      e = dom_.amgu(e, make_var(formals[i]), args[i]);
      if (e.bot) return bottom_elem(dom_.id, canon_vars(args.size()));
    }
    e = dom_.project(e, formals);
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < formals.size(); ++i)
      m[formals[i]] = canonical_arg_name(i);
    return dom_.rename(e, m);
  }

  // success description of a predicate we do not analyze: the first of its
  // assertions whose precondition covers the abstract call
  AbstractSubst trusted_success(const Module& m, const std::string& name,
                                std::size_t arity,
                                const AbstractSubst& callee_call) {
    PropEnv env = env_;
    env.target = &m;
    for (const Assertion* as : m.trusted_assertions(name, arity)) {
      TsResult pre = ts(dom_, env, as->head_vars, as->pre);
      if (dom_.leq(callee_call, to_canon(pre.over, as->head_vars))) {
        TsResult post = ts(dom_, env, as->head_vars, as->post);
        return to_canon(post.over, as->head_vars);
      }
    }
    return dom_.top(canon_vars(arity));
  }

  // ---- result assembly ----

  AnalysisResult finalize() {
    AnalysisResult r;
    r.module = target_.name;
    r.domain = dom_.id;
    r.types = tt_;
    r.steps = steps_;

    std::vector<int> ordered = ordered_nodes();

    if (dom_.id == DomainId::Shapes) {
      for (int id : ordered) {
        const Node& n = nodes_[id];
        for (const auto& v : n.call.vars) ensure_display(n.call.ty.at(v));
        for (int s : n.slots) ensure_display(s);
      }
      for (auto& [pred, elem] : entry_list_)
        for (const auto& v : elem.vars) ensure_display(elem.ty.at(v));
    }

    for (const auto& [pred, elem] : entry_list_)
      r.entries.emplace_back(pred, display_elem(elem));

    for (int id : ordered) {
      const Node& n = nodes_[id];
      Triple t;
      t.pred = n.pred;
      t.variant = n.variant;
      t.call = display_elem(n.call);
      t.succ = dom_.id == DomainId::Shfr ? n.succ : display_elem(succ_elem(n));
      r.triples.push_back(std::move(t));
    }

    if (dom_.id == DomainId::Shapes) {
      std::set<int> listed;
      for (const auto& [pred, elem] : r.entries) {
        (void)pred;
        collect_typedefs(elem, listed, r.typedefs);
      }
      for (const auto& t : r.triples) {
        collect_typedefs(t.call, listed, r.typedefs);
        collect_typedefs(t.succ, listed, r.typedefs);
      }
    }
    return r;
  }

  // source order of predicates, then variant creation order
  std::vector<int> ordered_nodes() const {
    std::vector<int> out;
    for (const auto& p : target_.preds) {
      auto it = variants_.find({p.name, p.arity});
      if (it == variants_.end()) continue;
      for (int id : it->second) out.push_back(id);
    }
    return out;
  }

  std::map<int, int> display_;
  int next_name_ = 1;

  bool is_leaf(int r) const {
    const TypeExpr& e = tt_->at(r);
    switch (e.k) {
    case TypeExpr::K::Top:
    case TypeExpr::K::Bot:
    case TypeExpr::K::Int:
    case TypeExpr::K::Num:
    case TypeExpr::K::Atm:
      return true;
    default:
      return false;
    }
  }

  // Picks the id a type is presented as: leaves inline, anything equal to a
  // declared type becomes that type, every other structure gets a fresh
  // name (t1, t2, ...) so elements and typedefs can refer to it compactly.
  int ensure_display(int id) {
    auto hit = display_.find(id);
    if (hit != display_.end()) return hit->second;
    int r = tt_->resolve(id);
    if (is_leaf(r)) {
      display_[id] = r;
      return r;
    }
    for (const auto& dn : tt_->declared()) {
      int d = *tt_->named(dn);
      if (tt_->equal(id, d)) {
        if (tt_->at(id).k == TypeExpr::K::Ref && !tt_->name_of(id))
          tt_->define(id, d); // chain the slot through the declared name
        display_[id] = d;
        return d;
      }
    }
    if (!tt_->name_of(id)) {
      std::string nm;
      do {
        nm = "t" + std::to_string(next_name_++);
      } while (tt_->named(nm));
      tt_->assign_name(id, nm);
    }
    display_[id] = id;
    // the definition body may reach further anonymous structures
    for (int kid : tt_->at(r).kids) ensure_display(kid);
    return id;
  }

  AbstractSubst display_elem(const AbstractSubst& a) {
    if (dom_.id == DomainId::Shfr || a.bot) return a;
    AbstractSubst out = a;
    for (const auto& v : a.vars) out.ty[v] = ensure_display(a.ty.at(v));
    return out;
  }

  // every named type reachable from the element, first encountered first
  void collect_typedefs(const AbstractSubst& elem, std::set<int>& listed,
                        std::vector<std::pair<std::string, std::string>>& out) {
    if (elem.bot) return;
    for (const auto& v : elem.vars) typedef_walk(elem.ty.at(v), listed, out);
  }

  void typedef_walk(int id, std::set<int>& listed,
                    std::vector<std::pair<std::string, std::string>>& out) {
    if (!listed.insert(id).second) return;
    if (auto nm = tt_->name_of(id))
      out.emplace_back(*nm, tt_->text(id));
    const TypeExpr& e = tt_->at(id);
    if (e.k == TypeExpr::K::Ref) {
      typedef_walk(e.kids[0], listed, out);
      return;
    }
    for (int kid : e.kids) typedef_walk(kid, listed, out);
  }
};

inline AnalysisResult analyze_module(const ModuleMap& mods, const Module& target,
                                     DomainId domain,
                                     const AnalysisOptions& opts = {},
                                     const Module* querydefs = nullptr,
                                     const std::vector<EntrySpec>& extra = {}) {
  Analyzer a(mods, target, domain, opts, querydefs);
  a.derive_default_entries();
  for (const auto& e : extra) a.add_entry_formula(e.pred, e.pre);
  return a.run();
}

} // namespace semsearch
