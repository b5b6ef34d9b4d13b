#pragma once

// Clauses, assertions and modules: the parsed form of a source file.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semsearch/term.hpp"

namespace semsearch {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct Body;

// A body goal: a predicate call, a unification, or a disjunction of bodies.
struct Goal {
  enum class Kind { Call, Unif, Disj };
  Kind kind = Kind::Call;
  TermPtr callee;                // Call: the literal p(t1,...,tn)
  TermPtr lhs, rhs;              // Unif: lhs = rhs
  std::vector<Body> branches;    // Disj
  SourceLoc loc;
};

struct Body {
  std::vector<Goal> goals;
};

struct Clause {
  TermPtr head; // always a Struct
  Body body;
  SourceLoc loc;
};

// A conjunction of property literals; a formula is a disjunction of those.
using PropConj = std::vector<TermPtr>;
using PropFormula = std::vector<PropConj>; // disjunctive normal form

enum class AssertionKind { Pred, TruePred, Trust };

// ':- pred Head : Pre => Post # "doc".' and its true/trust variants. The head
// predicate symbol may be a variable, which makes the assertion a query
// assertion (used by findp).
struct Assertion {
  AssertionKind kind = AssertionKind::Pred;
  bool is_query = false;
  std::string head_name;              // predicate symbol, or query variable name
  std::vector<std::string> head_vars; // distinct argument variables
  PropFormula pre;                    // empty means true
  PropFormula post;                   // empty means true
  std::string doc;
  SourceLoc loc;

  std::size_t arity() const { return head_vars.size(); }
  bool has_post() const { return !post.empty(); }
};

struct PredDef {
  std::string name;
  std::size_t arity = 0;
  std::vector<Clause> clauses;
  bool is_prop = false;
  bool is_regtype = false;
  bool exported = false;
  SourceLoc loc;

  PredId id(const std::string& module_name) const { return {module_name, name, arity}; }
};

struct Module {
  std::string name;
  std::vector<std::pair<std::string, std::size_t>> exports; // source order
  bool export_all = false;
  std::vector<std::string> imports;      // imported module names, source order
  std::vector<std::string> flags;        // third argument of the module decl
  std::vector<PredDef> preds;            // source order
  std::vector<Assertion> assertions;     // source order
  std::string source_hash;               // hex digest of the source bytes

  const PredDef* find_pred(const std::string& n, std::size_t a) const {
    for (const auto& p : preds)
      if (p.name == n && p.arity == a) return &p;
    return nullptr;
  }
  PredDef* find_pred(const std::string& n, std::size_t a) {
    for (auto& p : preds)
      if (p.name == n && p.arity == a) return &p;
    return nullptr;
  }

  bool is_exported(const std::string& n, std::size_t a) const {
    if (export_all) return find_pred(n, a) != nullptr || has_trust(n, a);
    for (const auto& e : exports)
      if (e.first == n && e.second == a) return true;
    return false;
  }

  bool has_trust(const std::string& n, std::size_t a) const {
    for (const auto& as : assertions)
      if (!as.is_query && as.head_name == n && as.arity() == a) return true;
    return false;
  }

  // Exported predicates in source order (declaration order, or definition
  // order under export_all).
  std::vector<std::pair<std::string, std::size_t>> exported_preds() const {
    if (!export_all) return exports;
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& p : preds) out.emplace_back(p.name, p.arity);
    for (const auto& as : assertions) {
      if (as.is_query) continue;
      auto e = std::make_pair(as.head_name, as.arity());
      if (!find_pred(e.first, e.second) &&
          std::find(out.begin(), out.end(), e) == out.end())
        out.push_back(e);
    }
    return out;
  }

  // User 'pred' assertions for one predicate, source order. These are the
  // assertions that seed analysis entries.
  std::vector<const Assertion*> pred_assertions(const std::string& n, std::size_t a) const {
    std::vector<const Assertion*> out;
    for (const auto& as : assertions)
      if (!as.is_query && as.kind == AssertionKind::Pred && as.head_name == n &&
          as.arity() == a)
        out.push_back(&as);
    return out;
  }

  // Assertions usable as trusted descriptions at call sites of an imported or
  // non-analyzable predicate: user 'pred' and 'trust' kinds, source order.
  std::vector<const Assertion*> trusted_assertions(const std::string& n, std::size_t a) const {
    std::vector<const Assertion*> out;
    for (const auto& as : assertions)
      if (!as.is_query && as.kind != AssertionKind::TruePred && as.head_name == n &&
          as.arity() == a)
        out.push_back(&as);
    return out;
  }
};

using ModuleMap = std::map<std::string, Module>;

inline const Module* find_module(const ModuleMap& mods, const std::string& name) {
  auto it = mods.find(name);
  return it == mods.end() ? nullptr : &it->second;
}

// Resolve a predicate reference from inside 'from': the module itself first,
// then the first import that exports the name. A trusted export without
// clauses resolves to its module with a null definition.
inline std::pair<const Module*, const PredDef*> resolve_pred(const ModuleMap& mods,
                                                             const Module& from,
                                                             const std::string& name,
                                                             std::size_t arity) {
  if (const PredDef* p = from.find_pred(name, arity)) return {&from, p};
  for (const auto& imp : from.imports) {
    const Module* m = find_module(mods, imp);
    if (!m || !m->is_exported(name, arity)) continue;
    return {m, m->find_pred(name, arity)};
  }
  return {nullptr, nullptr};
}

} // namespace semsearch
