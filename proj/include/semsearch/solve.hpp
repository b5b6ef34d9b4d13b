#pragma once

// Bounded resolution over a module set: leftmost selection, textual clause
// order, unification with occurs check. Every reduction step consumes budget;
// when the budget runs out the result is marked incomplete instead of looping.
//
// Built-in predicates: '='/2, true/0, succ/2 over non-negative integers, the
// instantiation checks var/1 ground/1 int/1 num/1 atm/1 term/1, and list/1 /
// list/2 as fallbacks when no visible definition exists.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semsearch/normalize.hpp"
#include "semsearch/program.hpp"
#include "semsearch/subst.hpp"
#include "semsearch/term.hpp"

namespace semsearch {

struct SolveOptions {
  std::size_t max_steps = 10000;
};

struct Answer {
  std::map<std::string, TermPtr> bindings; // goal variable -> applied term
};

struct SolveResult {
  std::vector<Answer> answers;
  bool complete = true; // false when the budget was hit or a call was unresolvable
};

enum class Truth { True, False, Unknown };

class Interp {
public:
  explicit Interp(const ModuleMap& mods, SolveOptions opts = {})
      : mods_(mods), opts_(opts) {}

  SolveResult solve(const Body& goal, const std::string& module) {
    return solve(goal, module, body_vars(goal));
  }

  SolveResult solve(const Body& goal, const std::string& module,
                    const std::vector<std::string>& goal_vars) {
    const Module* m = find_module(mods_, module);
    result_ = SolveResult{};
    if (!m) {
      result_.complete = false;
      return std::move(result_);
    }
    goal_vars_ = goal_vars;
    steps_ = opts_.max_steps;
    fresh_ = 0;
    std::vector<GoalRec> goals;
    for (const auto& g : goal.goals) goals.push_back({g, m});
    run(goals, Subst{});
    return std::move(result_);
  }

  SolveResult solve_term(const TermPtr& goal_term, const std::string& module) {
    Body b;
    Goal g;
    g.kind = Goal::Kind::Call;
    g.callee = goal_term;
    b.goals.push_back(std::move(g));
    return solve(b, module, term_vars(goal_term));
  }

  // Does the property conjunction succeed without instantiating 'lit'?
  // True: some solution leaves lit unchanged up to renaming. False: the
  // search was exhaustive and every solution (if any) bound lit further.
  Truth in_trivial_success(const TermPtr& lit, const PropConj& props,
                           const std::string& module) {
    Body b;
    std::vector<std::string> vars = term_vars(lit);
    std::set<std::string> seen(vars.begin(), vars.end());
    for (const auto& p : props) {
      Goal g;
      g.kind = Goal::Kind::Call;
      g.callee = p;
      b.goals.push_back(std::move(g));
      collect_vars(p, vars, seen);
    }
    SolveResult r = solve(b, module, vars);
    for (const auto& ans : r.answers) {
      Subst s;
      s.bind = ans.bindings;
      if (variant(s.apply(lit), lit)) return Truth::True;
    }
    return r.complete ? Truth::False : Truth::Unknown;
  }

private:
  struct GoalRec {
    Goal g;
    const Module* mod;
  };

  bool budget() {
    if (steps_ == 0) {
      result_.complete = false;
      return false;
    }
    --steps_;
    return true;
  }

  void record(const Subst& s) {
    Answer a;
    for (const auto& v : goal_vars_) a.bindings[v] = s.apply(make_var(v));
    result_.answers.push_back(std::move(a));
  }

  static std::vector<GoalRec> rest_after(const std::vector<GoalRec>& goals) {
    return std::vector<GoalRec>(goals.begin() + 1, goals.end());
  }

  static std::vector<GoalRec> prepend(std::vector<GoalRec> front,
                                      const std::vector<GoalRec>& back) {
    front.insert(front.end(), back.begin(), back.end());
    return front;
  }

  std::string fresh_name() { return "_S" + std::to_string(fresh_++); }

  void run(const std::vector<GoalRec>& goals, const Subst& s) {
    if (steps_ == 0) {
      result_.complete = false;
      return;
    }
    if (goals.empty()) {
      record(s);
      return;
    }
    const GoalRec& gr = goals.front();
    switch (gr.g.kind) {
    case Goal::Kind::Unif: {
      if (!budget()) return;
      Subst s2 = s;
      if (unify(gr.g.lhs, gr.g.rhs, s2)) run(rest_after(goals), s2);
      return;
    }
    case Goal::Kind::Disj: {
      std::vector<GoalRec> rest = rest_after(goals);
      for (const auto& br : gr.g.branches) {
        if (!budget()) return;
        std::vector<GoalRec> front;
        for (const auto& g : br.goals) front.push_back({g, gr.mod});
        run(prepend(std::move(front), rest), s);
      }
      return;
    }
    case Goal::Kind::Call:
      run_call(gr, goals, s);
      return;
    }
  }

  void run_call(const GoalRec& gr, const std::vector<GoalRec>& goals, const Subst& s) {
    const TermPtr& callee = gr.g.callee;
    const std::string& name = callee->name;
    std::size_t arity = callee->arity();

    if (name == "true" && arity == 0) {
      run(rest_after(goals), s);
      return;
    }
    if (name == "=" && arity == 2) {
      if (!budget()) return;
      Subst s2 = s;
      if (unify(callee->args[0], callee->args[1], s2)) run(rest_after(goals), s2);
      return;
    }
    if (arity == 1 && (name == "var" || name == "ground" || name == "int" ||
                       name == "num" || name == "atm" || name == "term")) {
      if (!budget()) return;
      if (check_native(name, s.apply(callee->args[0]))) run(rest_after(goals), s);
      return;
    }
    if (name == "succ" && arity == 2) {
      run_succ(callee, goals, s);
      return;
    }

    auto [mod, pred] = resolve_pred(mods_, *gr.mod, name, arity);
    if (!pred) {
      if (!mod && name == "list" && arity == 1) {
        run_list1(callee, gr.mod, goals, s);
        return;
      }
      if (!mod && name == "list" && arity == 2) {
        run_list2(callee, gr.mod, goals, s);
        return;
      }
      // Trusted import or missing definition: this branch cannot be explored.
      result_.complete = false;
      return;
    }

    std::vector<GoalRec> rest = rest_after(goals);
    for (const auto& clause : pred->clauses) {
      if (!budget()) return;
      std::map<std::string, std::string> ren;
      for (const auto& v : clause_vars(clause)) ren[v] = fresh_name();
      Clause fresh = rename_clause(clause, ren);
      Subst s2 = s;
      if (!unify(callee, fresh.head, s2)) continue;
      std::vector<GoalRec> front;
      for (const auto& g : fresh.body.goals) front.push_back({g, mod});
      run(prepend(std::move(front), rest), s2);
    }
  }

  static bool term_is_ground(const TermPtr& t) {
    if (t->is_var()) return false;
    for (const auto& a : t->args)
      if (!term_is_ground(a)) return false;
    return true;
  }

  static bool check_native(const std::string& name, const TermPtr& applied) {
    if (name == "var") return applied->is_var();
    if (name == "ground") return term_is_ground(applied);
    if (name == "int" || name == "num") return applied->is_int();
    if (name == "atm") return applied->is_atom();
    return true; // term/1
  }

  void run_succ(const TermPtr& callee, const std::vector<GoalRec>& goals, const Subst& s) {
    if (!budget()) return;
    TermPtr a = s.walk(callee->args[0]);
    TermPtr b = s.walk(callee->args[1]);
    auto as_nat = [](const TermPtr& t) -> long long {
      if (!t->is_int()) return -1;
      long long v = std::stoll(t->name);
      return v >= 0 ? v : -1;
    };
    if (a->is_int() && as_nat(a) >= 0) {
      TermPtr want = make_int(as_nat(a) + 1);
      Subst s2 = s;
      if (unify(b, want, s2)) run(rest_after(goals), s2);
      return;
    }
    if (a->is_var() && b->is_int() && as_nat(b) >= 1) {
      Subst s2 = s;
      if (unify(a, make_int(as_nat(b) - 1), s2)) run(rest_after(goals), s2);
      return;
    }
    if (a->is_var() && b->is_var()) {
      // Unbounded generator; give up on completeness rather than enumerate.
      result_.complete = false;
      return;
    }
    // Ill-typed or out-of-range arguments fail.
  }

  void run_list1(const TermPtr& callee, const Module* ctx,
                 const std::vector<GoalRec>& goals, const Subst& s) {
    std::vector<GoalRec> rest = rest_after(goals);
    const TermPtr& arg = callee->args[0];
    {
      if (!budget()) return;
      Subst s2 = s;
      if (unify(arg, nil(), s2)) run(rest, s2);
    }
    {
      if (!budget()) return;
      TermPtr h = make_var(fresh_name());
      TermPtr t = make_var(fresh_name());
      Subst s2 = s;
      if (unify(arg, cons(h, t), s2)) {
        Goal again;
        again.kind = Goal::Kind::Call;
        again.callee = make_struct("list", {t});
        run(prepend({GoalRec{again, ctx}}, rest), s2);
      }
    }
  }

  void run_list2(const TermPtr& callee, const Module* ctx,
                 const std::vector<GoalRec>& goals, const Subst& s) {
    TermPtr elem = s.walk(callee->args[1]);
    if (!elem->is_atom()) {
      result_.complete = false; // element property must be a visible prop name
      return;
    }
    std::vector<GoalRec> rest = rest_after(goals);
    const TermPtr& arg = callee->args[0];
    {
      if (!budget()) return;
      Subst s2 = s;
      if (unify(arg, nil(), s2)) run(rest, s2);
    }
    {
      if (!budget()) return;
      TermPtr h = make_var(fresh_name());
      TermPtr t = make_var(fresh_name());
      Subst s2 = s;
      if (unify(arg, cons(h, t), s2)) {
        Goal on_head;
        on_head.kind = Goal::Kind::Call;
        on_head.callee = make_struct(elem->name, {h});
        Goal again;
        again.kind = Goal::Kind::Call;
        again.callee = make_struct("list", {t, elem});
        run(prepend({GoalRec{on_head, ctx}, GoalRec{again, ctx}}, rest), s2);
      }
    }
  }

  const ModuleMap& mods_;
  SolveOptions opts_;
  SolveResult result_;
  std::vector<std::string> goal_vars_;
  std::size_t steps_ = 0;
  unsigned long fresh_ = 0;
};

} // namespace semsearch
