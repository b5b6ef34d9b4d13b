#pragma once

// Proves query conditions against inferred call/success triples, one
// verdict per abstract domain, and combines them into a match status.
//
//   checked - every behavior the analysis admits satisfies the condition
//   false   - no behavior the analysis admits can satisfy it
//   check   - neither could be established
//
// A calls condition quantifies over every triple of the candidate: all
// inferred calling modes must provably lie inside the query precondition.
// A success condition only constrains triples whose call pattern matches
// the precondition; exact matches are preferred over wider covering ones
// because they carry the sharpest success substitution.

#include "analysis.hpp"
#include "assertions.hpp"

#include <algorithm>
#include <optional>

namespace semsearch {

struct MatcherError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Status { Checked, Check, False };

inline int status_rank(Status s) {
  switch (s) {
  case Status::Checked: return 0;
  case Status::Check: return 1;
  case Status::False: return 2;
  }
  return 2;
}

inline std::string status_name(Status s) {
  switch (s) {
  case Status::Checked: return "checked";
  case Status::Check: return "check";
  case Status::False: return "false";
  }
  return "check";
}

inline std::optional<Status> status_from_name(const std::string& s) {
  if (s == "checked") return Status::Checked;
  if (s == "check") return Status::Check;
  if (s == "false") return Status::False;
  return std::nullopt;
}

// Why a verdict stopped at check.
enum class Note { None, NoTriples, RefineSuggested, AccuracyLimit };

inline std::string note_name(Note n) {
  switch (n) {
  case Note::None: return "";
  case Note::NoTriples: return "no_triples";
  case Note::RefineSuggested: return "refine_suggested";
  case Note::AccuracyLimit: return "accuracy_limit";
  }
  return "";
}

struct Verdict {
  Status status = Status::Check;
  Note note = Note::None;
};

struct DomainVerdict {
  DomainId domain = DomainId::Shfr;
  Verdict verdict;
};

struct ConditionResult {
  std::string text;
  AssertionCondition::Kind kind = AssertionCondition::Kind::Calls;
  std::vector<DomainVerdict> verdicts; // shfr first, then shapes
  Status combined = Status::Check;
};

struct MatchResult {
  std::string module;
  std::string pred;
  std::size_t arity = 0;
  Status status = Status::Check;
  std::vector<ConditionResult> residue;
};

// ---------------------------------------------------------------------------
// per-domain condition checks

inline Verdict check_calls(const Dom& dom, const PropEnv& env,
                           const std::vector<std::string>& vars,
                           const PropFormula& pre,
                           const std::vector<const Triple*>& triples) {
  if (triples.empty()) return {Status::Check, Note::NoTriples};
  TsResult t = ts(dom, env, vars, pre);

  bool all_within = true;
  for (const Triple* tr : triples)
    if (!covered_by_under(dom, tr->call, t)) {
      all_within = false;
      break;
    }
  if (all_within) return {Status::Checked, Note::None};

  bool all_apart = true;
  for (const Triple* tr : triples)
    if (!dom.glb(tr->call, t.over).bot) {
      all_apart = false;
      break;
    }
  if (all_apart) return {Status::False, Note::None};

  return {Status::Check, Note::None};
}

inline Verdict check_success(const Dom& dom, const PropEnv& env,
                             const std::vector<std::string>& vars,
                             const PropFormula& pre, const PropFormula& post,
                             const std::vector<const Triple*>& triples) {
  if (triples.empty()) return {Status::Check, Note::NoTriples};
  TsResult pre_ts = ts(dom, env, vars, pre);
  TsResult post_ts = ts(dom, env, vars, post);

  // triples whose call pattern matches the precondition; a variant analyzed
  // at exactly the precondition beats wider ones that merely cover it
  std::vector<const Triple*> exact, covering;
  for (const Triple* tr : triples) {
    if (dom.equal(tr->call, pre_ts.over)) exact.push_back(tr);
    else if (dom.leq(pre_ts.over, tr->call)) covering.push_back(tr);
  }
  const std::vector<const Triple*>& sel = exact.empty() ? covering : exact;
  if (sel.empty()) return {Status::Check, Note::RefineSuggested};

  bool all_comply = true;
  for (const Triple* tr : sel) {
    if (tr->succ.bot) continue; // no successes: nothing to violate
    if (!covered_by_under(dom, tr->succ, post_ts)) {
      all_comply = false;
      break;
    }
  }
  if (all_comply) return {Status::Checked, Note::None};

  bool all_violate = true;
  for (const Triple* tr : sel)
    if (!covered_by_under(dom, tr->call, pre_ts) ||
        !dom.glb(tr->succ, post_ts.over).bot) {
      all_violate = false;
      break;
    }
  if (all_violate) return {Status::False, Note::None};

  return {Status::Check,
          exact.empty() ? Note::RefineSuggested : Note::AccuracyLimit};
}

// Domains are consulted independently; a definite answer from either side
// settles the condition.  Both definite and disagreeing would mean one of
// the domains is unsound.
inline Status combine_domains(const std::vector<DomainVerdict>& vs) {
  bool any_checked = false, any_false = false;
  for (const auto& v : vs) {
    any_checked |= v.verdict.status == Status::Checked;
    any_false |= v.verdict.status == Status::False;
  }
  if (any_checked && any_false)
    throw MatcherError("domains disagree: condition both checked and false");
  if (any_false) return Status::False;
  if (any_checked) return Status::Checked;
  return Status::Check;
}

inline Status overall_status(const std::vector<ConditionResult>& residue) {
  bool all_checked = !residue.empty();
  for (const auto& c : residue) {
    if (c.combined == Status::False) return Status::False;
    all_checked &= c.combined == Status::Checked;
  }
  return all_checked ? Status::Checked : Status::Check;
}

// ---------------------------------------------------------------------------
// corpus evaluation

using Corpus = std::map<std::pair<std::string, DomainId>, AnalysisResult>;

struct FindOptions {
  std::vector<DomainId> domains{DomainId::Shfr, DomainId::Shapes};
  std::vector<std::string> keywords;    // all must occur (case-insensitive)
  std::optional<Status> required_status;
  bool refine = false;
  AnalysisOptions analysis; // used by refinement reruns
};

namespace detail {

inline std::string lowercased(const std::string& s) {
  std::string r = s;
  std::transform(r.begin(), r.end(), r.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return r;
}

// module name + predicate name + its assertion docs
inline std::string keyword_haystack(const Module& m, const std::string& pred,
                                    std::size_t arity) {
  std::string hay = m.name + " " + pred;
  for (const Assertion* a : m.pred_assertions(pred, arity))
    hay += " " + a->doc;
  for (const Assertion* a : m.trusted_assertions(pred, arity))
    hay += " " + a->doc;
  return lowercased(hay);
}

inline bool keywords_hit(const std::string& hay,
                         const std::vector<std::string>& keywords) {
  for (const auto& k : keywords)
    if (hay.find(lowercased(k)) == std::string::npos) return false;
  return true;
}

// Per-(module,domain) evaluation context.  Shapes conditions are granted a
// private copy of the module's type table: ids inside the stored triples
// stay valid, while query-local types land in the copy only.
struct DomainCtx {
  const AnalysisResult* result;
  std::shared_ptr<TypeTable> table; // the copy (shapes), or null (shfr)
  std::unique_ptr<shapes::TypeBinder> binder;
  std::unique_ptr<Dom> dom;
  PropEnv env;

  DomainCtx(const ModuleMap& mods, const Module& target, const Module& qdefs,
            const AnalysisResult& r)
      : result(&r) {
    if (r.domain == DomainId::Shapes) {
      table = std::make_shared<TypeTable>(*r.types);
      binder = std::make_unique<shapes::TypeBinder>(*table);
      binder->mods = &mods;
      binder->target = &target;
      binder->query = &qdefs;
      binder->declare_query_types();
      dom = std::make_unique<Dom>(DomainId::Shapes, table.get());
    } else {
      dom = std::make_unique<Dom>(DomainId::Shfr, nullptr);
    }
    env.mods = &mods;
    env.target = &target;
    env.query = &qdefs;
    env.binder = binder.get();
  }
};

inline Verdict evaluate_condition(const DomainCtx& ctx,
                                  const AssertionCondition& cond,
                                  const std::vector<std::string>& vars,
                                  const std::vector<const Triple*>& triples) {
  if (cond.kind == AssertionCondition::Kind::Calls)
    return check_calls(*ctx.dom, ctx.env, vars, cond.pre, triples);
  return check_success(*ctx.dom, ctx.env, vars, cond.pre, cond.post, triples);
}

} // namespace detail

// Evaluates the query against every analyzed module in the corpus and
// returns matches ordered best-first (checked, check, false), ties broken
// by module and predicate name.
inline std::vector<MatchResult> findp(const ModuleMap& mods,
                                      const Corpus& corpus,
                                      const PredicateQuery& query,
                                      const FindOptions& opts = {}) {
  std::vector<AssertionCondition> conds = conditions_for(query);

  std::set<std::string> module_names;
  for (const auto& [key, r] : corpus) {
    (void)r;
    module_names.insert(key.first);
  }

  std::vector<MatchResult> out;
  for (const std::string& mname : module_names) {
    if (query.module_filter && *query.module_filter != mname) continue;
    const Module* m = find_module(mods, mname);
    if (!m) continue;

    std::vector<std::unique_ptr<detail::DomainCtx>> ctxs;
    for (DomainId d : opts.domains) {
      auto it = corpus.find({mname, d});
      if (it != corpus.end())
        ctxs.push_back(std::make_unique<detail::DomainCtx>(mods, *m, query.defs,
                                                           it->second));
    }
    if (ctxs.empty()) continue;

    for (const auto& [pname, parity] : m->exported_preds()) {
      if (parity != query.arity) continue;
      if (query.pred_filter && *query.pred_filter != pname) continue;
      if (!opts.keywords.empty() &&
          !detail::keywords_hit(detail::keyword_haystack(*m, pname, parity),
                                opts.keywords))
        continue;

      MatchResult res;
      res.module = mname;
      res.pred = pname;
      res.arity = parity;
      auto vars = canon_vars(parity);

      for (const AssertionCondition& cond : conds) {
        ConditionResult cr;
        cr.text = cond.text;
        cr.kind = cond.kind;
        for (const auto& ctx : ctxs) {
          auto triples = ctx->result->triples_for(pname, parity);
          DomainVerdict dv;
          dv.domain = ctx->result->domain;
          dv.verdict = detail::evaluate_condition(*ctx, cond, vars, triples);
          cr.verdicts.push_back(dv);
        }
        cr.combined = combine_domains(cr.verdicts);
        res.residue.push_back(std::move(cr));
      }
      res.status = overall_status(res.residue);
      out.push_back(std::move(res));
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const MatchResult& a, const MatchResult& b) {
                     int ra = status_rank(a.status), rb = status_rank(b.status);
                     if (ra != rb) return ra < rb;
                     if (a.module != b.module) return a.module < b.module;
                     return a.pred < b.pred;
                   });

  auto keep = [&](const MatchResult& r) {
    if (query.required_status &&
        status_name(r.status) != *query.required_status)
      return false;
    if (opts.required_status && r.status != *opts.required_status) return false;
    return true;
  };
  std::vector<MatchResult> filtered;
  for (auto& r : out)
    if (keep(r)) filtered.push_back(std::move(r));
  return filtered;
}

// ---------------------------------------------------------------------------
// refinement: re-analyze with the query preconditions as extra entries

// A refined verdict may only sharpen: check gives way to a definite answer,
// definite answers never regress (a flip between checked and false would
// expose an unsound domain).
inline void merge_verdict(Verdict& into, const Verdict& refined) {
  if (into.status == Status::Check) {
    into = refined;
    return;
  }
  if (refined.status != Status::Check && refined.status != into.status)
    throw MatcherError("refinement flipped a definite verdict");
}

// Re-analyzes the modules of the given results with one extra entry per
// condition precondition, then re-evaluates any condition that was left at
// check.  Results keep their identity; statuses are recomputed.
inline void refine_and_recheck(const ModuleMap& mods,
                               const PredicateQuery& query,
                               std::vector<MatchResult>& results,
                               const FindOptions& opts = {}) {
  std::vector<AssertionCondition> conds = conditions_for(query);

  auto needs_refine = [](const MatchResult& r) {
    for (const auto& c : r.residue)
      for (const auto& dv : c.verdicts)
        if (dv.verdict.note == Note::RefineSuggested) return true;
    return false;
  };

  // group the entry requests per module so each is re-analyzed once
  std::map<std::string, std::vector<EntrySpec>> wanted;
  for (const MatchResult& r : results) {
    if (!needs_refine(r)) continue;
    for (const AssertionCondition& c : conds)
      wanted[r.module].push_back(
          {PredId{r.module, r.pred, r.arity}, c.pre});
  }

  std::map<std::pair<std::string, DomainId>, AnalysisResult> refined;
  for (const auto& [mname, entries] : wanted) {
    const Module* m = find_module(mods, mname);
    if (!m) continue;
    for (DomainId d : opts.domains)
      refined.emplace(std::pair<std::string, DomainId>{mname, d},
                      analyze_module(mods, *m, d, opts.analysis, &query.defs,
                                     entries));
  }

  for (MatchResult& r : results) {
    if (!needs_refine(r)) continue;
    const Module* m = find_module(mods, r.module);
    if (!m) continue;
    auto vars = canon_vars(r.arity);

    for (DomainId d : opts.domains) {
      auto it = refined.find({r.module, d});
      if (it == refined.end()) continue;
      detail::DomainCtx ctx(mods, *m, query.defs, it->second);
      auto triples = it->second.triples_for(r.pred, r.arity);

      for (std::size_t ci = 0; ci < conds.size(); ++ci) {
        for (DomainVerdict& dv : r.residue[ci].verdicts) {
          if (dv.domain != d) continue;
          Verdict v = detail::evaluate_condition(ctx, conds[ci], vars, triples);
          merge_verdict(dv.verdict, v);
        }
      }
    }
    for (ConditionResult& c : r.residue) c.combined = combine_domains(c.verdicts);
    r.status = overall_status(r.residue);
  }

  std::stable_sort(results.begin(), results.end(),
                   [](const MatchResult& a, const MatchResult& b) {
                     int ra = status_rank(a.status), rb = status_rank(b.status);
                     if (ra != rb) return ra < rb;
                     if (a.module != b.module) return a.module < b.module;
                     return a.pred < b.pred;
                   });
}

} // namespace semsearch
