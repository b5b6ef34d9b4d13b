// Concrete resolution: answer enumeration, occurs check, builtins and the
// trivial-success test used when proving property preconditions.

#include <catch_amalgamated.hpp>

#include "semsearch/parser.hpp"
#include "semsearch/solve.hpp"

using namespace semsearch;

namespace {

ModuleMap load(const std::string& src, const std::string& name) {
  ModuleMap mods;
  Module m = parse_module(src, name);
  mods.emplace(m.name, std::move(m));
  return mods;
}

const char* k_base_src =
    R"(
:- module(cm, _).
app([], Ys, Ys).
app([X|Xs], Ys, [X|Zs]) :- app(Xs, Ys, Zs).
rev([], []).
rev([X|Xs], R) :- rev(Xs, T), app(T, [X], R).
nat(z).
nat(s(N)) :- nat(N).
loop :- loop.
pick(X) :- (X = a ; X = b).
len([], 0).
len([_|T], N) :- len(T, M), succ(M, N).
bit(0).
bit(1).
)";

std::string binding_text(const Answer& a, const std::string& v) {
  auto it = a.bindings.find(v);
  REQUIRE(it != a.bindings.end());
  return term_text(it->second);
}

} // namespace

TEST_CASE("facts and rules enumerate answers in clause order") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve_term(parse_term_text("app([1,2],[3],Zs)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "Zs") == "[1,2,3]");

  r = in.solve_term(parse_term_text("app(Xs,Ys,[1,2])"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 3);
  CHECK(binding_text(r.answers[0], "Xs") == "[]");
  CHECK(binding_text(r.answers[0], "Ys") == "[1,2]");
  CHECK(binding_text(r.answers[1], "Xs") == "[1]");
  CHECK(binding_text(r.answers[2], "Ys") == "[]");

  r = in.solve_term(parse_term_text("rev([1,2,3],R)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "R") == "[3,2,1]");

  r = in.solve_term(parse_term_text("pick(X)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 2);
  CHECK(binding_text(r.answers[0], "X") == "a");
  CHECK(binding_text(r.answers[1], "X") == "b");
}

TEST_CASE("clause variables are renamed apart per activation") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  // the same clause participates at several depths without capture
  SolveResult r = in.solve_term(parse_term_text("nat(s(s(z)))"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.size() == 1);

  // two independent calls of app/3 in one derivation
  r = in.solve(parse_goal("app([1],[2],M), app(M,[3],R)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "R") == "[1,2,3]");
}

TEST_CASE("unification applies the occurs check") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve(parse_goal("X = f(X)"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  // indirectly: Ys aliases into its own tail
  r = in.solve_term(parse_term_text("app([],X,[1|X])"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  // plain aliasing still works
  r = in.solve(parse_goal("X = Y, Y = g(Z), Z = a"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "X") == "g(a)");
}

TEST_CASE("the step budget reports incompleteness instead of hanging") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods, SolveOptions{2000});

  SolveResult r = in.solve_term(parse_term_text("loop"), "cm");
  CHECK_FALSE(r.complete);
  CHECK(r.answers.empty());

  // an infinite generator still yields its first answers before giving up
  r = in.solve_term(parse_term_text("len(L,1)"), "cm");
  CHECK_FALSE(r.complete);
  REQUIRE(!r.answers.empty());
  auto t = r.answers[0].bindings.at("L");
  REQUIRE(t->name == ".");
  CHECK(term_text(t->args[1]) == "[]");
}

TEST_CASE("integer successor works in both modes and fails cleanly") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve(parse_goal("succ(2,N)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "N") == "3");

  r = in.solve(parse_goal("succ(M,3)"), "cm");
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "M") == "2");

  // zero has no predecessor; failure is definite
  r = in.solve(parse_goal("succ(M,0)"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  r = in.solve(parse_goal("succ(a,N)"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  // both sides unbound would enumerate forever; declared incomplete instead
  r = in.solve(parse_goal("succ(M,N)"), "cm");
  CHECK_FALSE(r.complete);
  CHECK(r.answers.empty());
}

TEST_CASE("native property tests follow the term structure") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve(parse_goal("var(X)"), "cm");
  CHECK(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].bindings.at("X")->is_var());

  auto succeeds = [&](const std::string& goal) {
    SolveResult s = in.solve(parse_goal(goal), "cm");
    return s.complete && s.answers.size() == 1;
  };
  auto fails = [&](const std::string& goal) {
    SolveResult s = in.solve(parse_goal(goal), "cm");
    return s.complete && s.answers.empty();
  };

  CHECK(succeeds("ground(f(a,[1]))"));
  CHECK(fails("ground(f(a,[1|X]))"));
  CHECK(succeeds("int(3)"));
  CHECK(succeeds("int(-3)"));
  CHECK(fails("int(a)"));
  CHECK(fails("int(X)"));
  CHECK(succeeds("num(7)"));
  CHECK(succeeds("atm(foo)"));
  CHECK(succeeds("atm([])"));
  CHECK(fails("atm(f(a))"));
  CHECK(fails("atm(12)"));
  CHECK(succeeds("term(X)"));
  CHECK(succeeds("term(f(X))"));
}

TEST_CASE("list tests fall back to a native definition when none is visible") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve(parse_goal("list([a,b])"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.size() == 1);

  r = in.solve(parse_goal("list([a|b])"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  // the two-argument form checks every element with the named property
  r = in.solve(parse_goal("list([0,1,1], bit)"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.size() == 1);

  r = in.solve(parse_goal("list([0,a], bit)"), "cm");
  CHECK(r.complete);
  CHECK(r.answers.empty());

  // an unbound element property cannot be resolved
  r = in.solve(parse_goal("list([0], P)"), "cm");
  CHECK_FALSE(r.complete);

  // a visible definition wins over the native fallback
  ModuleMap own = load(":- module(own, _).\nlist(yes).\n", "own");
  Interp in2(own);
  SolveResult r2 = in2.solve(parse_goal("list(yes)"), "own");
  CHECK(r2.answers.size() == 1);
  r2 = in2.solve(parse_goal("list([])"), "own");
  CHECK(r2.complete);
  CHECK(r2.answers.empty());
}

TEST_CASE("calls without a visible definition lose completeness, not crash") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);

  SolveResult r = in.solve(parse_goal("mystery(X)"), "cm");
  CHECK_FALSE(r.complete);
  CHECK(r.answers.empty());

  // failure of one branch does not mask incompleteness of another
  r = in.solve(parse_goal("(mystery(X) ; X = a)"), "cm");
  CHECK_FALSE(r.complete);
  REQUIRE(r.answers.size() == 1);
  CHECK(binding_text(r.answers[0], "X") == "a");
}

TEST_CASE("explicit goal variables restrict recorded bindings") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods);
  Body goal = parse_goal("app([1],[2],R), app(R,[],S)");
  SolveResult r = in.solve(goal, "cm", {"S"});
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].bindings.size() == 1);
  CHECK(binding_text(r.answers[0], "S") == "[1,2]");
}

TEST_CASE("trivial-success is three-valued") {
  ModuleMap mods = load(k_base_src, "cm");
  Interp in(mods, SolveOptions{3000});

  TermPtr lit = parse_term_text("f(X)");

  // var(X) succeeds leaving X untouched
  CHECK(in.in_trivial_success(lit, {parse_term_text("var(X)")}, "cm") ==
        Truth::True);

  // an empty conjunction is trivially true
  CHECK(in.in_trivial_success(lit, {}, "cm") == Truth::True);

  // int(X) on an unbound variable fails outright, and the search is complete
  CHECK(in.in_trivial_success(lit, {parse_term_text("int(X)")}, "cm") ==
        Truth::False);

  // bindings to other variables do not disturb the literal
  CHECK(in.in_trivial_success(lit, {parse_term_text("pick(Y)")}, "cm") ==
        Truth::True);

  // list(X) succeeds only by instantiating X, and enumerates without end
  CHECK(in.in_trivial_success(lit, {parse_term_text("list(X)")}, "cm") ==
        Truth::Unknown);

  // bit(X) instantiates X in every solution, and the search is finite
  CHECK(in.in_trivial_success(lit, {parse_term_text("bit(X)")}, "cm") ==
        Truth::False);
}
