// Parser, term printing and clause normalization.

#include <catch_amalgamated.hpp>

#include "semsearch/normalize.hpp"
#include "semsearch/parser.hpp"
#include "semsearch/subst.hpp"

using namespace semsearch;

TEST_CASE("canonical term printing round-trips") {
  for (const std::string s : {
           "[]",
           "[a,b,c]",
           "[X|Xs]",
           "[1,2|T]",
           "A-B",
           "(A,B)",
           "f(g(X),-3)",
           "'Weird atom'",
           "graph([a],[(a,b)])",
           "x-y-z",
           "[A-B,C-D]",
       }) {
    CAPTURE(s);
    CHECK(term_text(parse_term_text(s)) == s);
  }
}

TEST_CASE("infix operators associate and bind as declared") {
  TermPtr t = parse_term_text("a-b-c"); // '-' is left-associative
  REQUIRE(t->name == "-");
  CHECK(term_text(t->args[0]) == "a-b");
  CHECK(term_text(t->args[1]) == "c");

  t = parse_term_text("p/2");
  REQUIRE(t->name == "/");
  CHECK(t->args[0]->name == "p");
  CHECK(t->args[1]->name == "2");

  t = parse_term_text("X = a-b"); // '=' looser than '-'
  REQUIRE(t->name == "=");
  CHECK(term_text(t->args[1]) == "a-b");

  t = parse_term_text("(a,b,c)"); // ',' is right-associative
  REQUIRE(t->name == ",");
  CHECK(t->args[1]->name == ",");

  // '-' before a digit is a negative literal, not an operator
  t = parse_term_text("-7");
  CHECK(t->is_int());
  CHECK(t->name == "-7");
}

TEST_CASE("goals split into calls, unifications and disjunctions") {
  Body b = parse_goal("p(X), X = f(Y), (q(Y) ; r(Y))");
  REQUIRE(b.goals.size() == 3);
  CHECK(b.goals[0].kind == Goal::Kind::Call);
  CHECK(b.goals[0].callee->name == "p");
  CHECK(b.goals[1].kind == Goal::Kind::Unif);
  CHECK(term_text(b.goals[1].rhs) == "f(Y)");
  REQUIRE(b.goals[2].kind == Goal::Kind::Disj);
  REQUIRE(b.goals[2].branches.size() == 2);
  CHECK(b.goals[2].branches[0].goals[0].callee->name == "q");

  // 'true' contributes no goal
  CHECK(parse_goal("true, p(X)").goals.size() == 1);

  // nested disjunction flattens into one goal with three branches
  Body c = parse_goal("(a ; b ; c)");
  REQUIRE(c.goals.size() == 1);
  CHECK(c.goals[0].branches.size() == 3);

  CHECK_THROWS_AS(parse_goal("X"), ParseError);
  CHECK_THROWS_AS(parse_goal("p(X) ,"), ParseError);
}

static const char* k_demo_src =
    R"(
:- module(demo, [sum/3, first/2, choose/1], [assertions]).
:- use_module(lists).
:- use_module(library(extra)).

% peano addition, used by the directive tests below
:- pred sum(A, B, C) : (int(A), int(B)) => int(C) # "C is the sum.".
sum(z, B, B).
sum(s(A), B, s(C)) :- sum(A, B, C).

first([X|_], X).

:- trust pred choose(N) : int(N) # "chosen by the runtime".

:- pred first(Xs, X) : list(Xs).
)";

TEST_CASE("module parsing captures header, clauses and assertions") {
  Module m = parse_module(k_demo_src, "ignored");

  CHECK(m.name == "demo");
  REQUIRE(m.exports.size() == 3);
  CHECK(m.exports[0] == std::make_pair(std::string("sum"), std::size_t{3}));
  CHECK(m.exports[2] == std::make_pair(std::string("choose"), std::size_t{1}));
  CHECK(m.flags == std::vector<std::string>{"assertions"});
  CHECK(m.imports == std::vector<std::string>{"lists", "extra"});
  CHECK(m.source_hash == sha256_hex(k_demo_src));

  const PredDef* sum = m.find_pred("sum", 3);
  REQUIRE(sum);
  CHECK(sum->clauses.size() == 2);
  CHECK(sum->exported);
  CHECK(sum->clauses[0].loc.line == 8);
  CHECK(term_text(sum->clauses[1].head) == "sum(s(A),B,s(C))");

  // choose/1 has no clauses but a trust assertion covers its export
  CHECK(m.find_pred("choose", 1) == nullptr);
  CHECK(m.has_trust("choose", 1));
  auto ex = m.exported_preds();
  CHECK(ex.size() == 3);

  REQUIRE(m.assertions.size() == 3);
  const Assertion& a0 = m.assertions[0];
  CHECK(a0.kind == AssertionKind::Pred);
  CHECK_FALSE(a0.is_query);
  CHECK(a0.head_name == "sum");
  CHECK(a0.head_vars == std::vector<std::string>{"A", "B", "C"});
  REQUIRE(a0.pre.size() == 1);
  REQUIRE(a0.pre[0].size() == 2);
  CHECK(term_text(a0.pre[0][0]) == "int(A)");
  REQUIRE(a0.post.size() == 1);
  CHECK(term_text(a0.post[0][0]) == "int(C)");
  CHECK(a0.doc == "C is the sum.");
  CHECK(a0.loc.line == 7);

  CHECK(m.assertions[1].kind == AssertionKind::Trust);
  CHECK(m.assertions[1].loc.line == 13);
  CHECK_FALSE(m.assertions[2].has_post());

  // assertion selectors
  CHECK(m.pred_assertions("sum", 3).size() == 1);
  CHECK(m.trusted_assertions("choose", 1).size() == 1);
  CHECK(m.pred_assertions("choose", 1).empty());
}

TEST_CASE("module validation rejects bad declarations") {
  // export without definition or trusted assertion
  CHECK_THROWS_AS(parse_module(":- module(m, [nope/1]).", ""), ParseError);
  // prop declaration for an undefined predicate
  CHECK_THROWS_AS(parse_module(":- module(m, []).\n:- prop q/1.", ""),
                  ParseError);
  // clauses before the module header
  CHECK_THROWS_AS(parse_module("p(a).\n:- module(m, []).", ""), ParseError);
  CHECK_THROWS_AS(parse_module(":- module(m, []).\n:- module(m2, []).", ""),
                  ParseError);
  // assertion head variables must be distinct and named
  CHECK_THROWS_AS(parse_assertion(":- pred p(A, A) : int(A)."), ParseError);
  CHECK_THROWS_AS(parse_assertion(":- pred p(A, _) : int(A)."), ParseError);
  // query assertions need a usable head variable
  CHECK_THROWS_AS(parse_assertion(":- pred _(A) : int(A)."), ParseError);
}

TEST_CASE("anonymous module names and export_all") {
  Module m = parse_module(":- module(_, _).\np(a).\nq(b).\n", "fallback");
  CHECK(m.name == "fallback");
  CHECK(m.export_all);
  auto ex = m.exported_preds();
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].first == "p"); // definition order
  CHECK(m.is_exported("q", 1));
  CHECK_FALSE(m.is_exported("q", 2));
}

TEST_CASE("prop and regtype declarations mark their predicate") {
  Module m = parse_module(":- module(m, []).\n"
                          ":- regtype b/1.\n"
                          "b(b0).\nb(b1).\n"
                          ":- prop even(X).\n"
                          "even(z).\neven(s(s(X))) :- even(X).\n",
                          "");
  const PredDef* b = m.find_pred("b", 1);
  REQUIRE(b);
  CHECK(b->is_prop);
  CHECK(b->is_regtype);
  const PredDef* ev = m.find_pred("even", 1);
  REQUIRE(ev);
  CHECK(ev->is_prop);
  CHECK_FALSE(ev->is_regtype);
}

TEST_CASE("anonymous variables are fresh per occurrence") {
  Module m = parse_module(":- module(m, []).\npair(_, _).\n", "");
  const PredDef* p = m.find_pred("pair", 2);
  REQUIRE(p);
  const TermPtr& head = p->clauses[0].head;
  REQUIRE(head->args[0]->is_var());
  REQUIRE(head->args[1]->is_var());
  CHECK(head->args[0]->name != head->args[1]->name);
}

TEST_CASE("property formulas normalize to disjunctions of conjunctions") {
  Assertion a = parse_assertion(":- pred p(A) : (int(A) ; atm(A)) => atm(A).");
  CHECK(a.pre.size() == 2);

  a = parse_assertion(":- pred p(A, B) : (int(A), (atm(B) ; num(B))).");
  REQUIRE(a.pre.size() == 2);
  CHECK(a.pre[0].size() == 2);
  CHECK(term_text(a.pre[0][0]) == "int(A)");
  CHECK(term_text(a.pre[1][1]) == "num(B)");

  // a true disjunct swallows the whole formula; so does a bare 'true'
  a = parse_assertion(":- pred p(A) : true => int(A).");
  CHECK(a.pre.empty());
  CHECK(a.has_post());
  a = parse_assertion(":- pred p(A) : (int(A) ; true).");
  CHECK(a.pre.empty());

  // query form: variable head symbol
  a = parse_assertion(":- pred X(A, B) : (list(A), var(B)) => int(B).");
  CHECK(a.is_query);
  CHECK(a.head_name == "X");
  CHECK(a.arity() == 2);
}

TEST_CASE("head normalization moves argument patterns into the body") {
  auto clause_of = [](const std::string& src) {
    Module m = parse_module(":- module(m, []).\n" + src + "\n", "");
    REQUIRE(m.preds.size() >= 1);
    return m.preds[0].clauses.at(0);
  };

  SECTION("already-normal clauses are untouched") {
    Clause c = clause_of("p(A, B) :- q(A, B).");
    Clause n = normalize_clause(c);
    CHECK(term_equal(n.head, c.head));
    REQUIRE(n.body.goals.size() == 1);
    CHECK(n.body.goals[0].kind == Goal::Kind::Call);
  }

  SECTION("structured arguments become leading unifications") {
    Clause n = normalize_clause(clause_of("p(f(X), X) :- q(X)."));
    CHECK(term_text(n.head) == "p(A,B)");
    REQUIRE(n.body.goals.size() == 3);
    CHECK(n.body.goals[0].kind == Goal::Kind::Unif);
    CHECK(term_text(n.body.goals[0].lhs) == "A");
    CHECK(term_text(n.body.goals[0].rhs) == "f(X)");
    CHECK(term_text(n.body.goals[1].rhs) == "X");
    CHECK(n.body.goals[2].kind == Goal::Kind::Call);
  }

  SECTION("canonical names in the wrong position move aside first") {
    Clause n = normalize_clause(clause_of("p(B, A) :- r(A, B)."));
    CHECK(term_text(n.head) == "p(A,B)");
    REQUIRE(n.body.goals.size() == 3);
    // the renamed originals keep the clause well-scoped
    std::string v0 = n.body.goals[0].rhs->name;
    std::string v1 = n.body.goals[1].rhs->name;
    CHECK(v0 != "A");
    CHECK(v1 != "B");
    CHECK(v0 != v1);
    CHECK(term_text(n.body.goals[2].callee) ==
          "r(" + v1 + "," + v0 + ")");
  }

  SECTION("kept positions do not generate goals") {
    Clause n = normalize_clause(clause_of("p(A, f(A))."));
    CHECK(term_text(n.head) == "p(A,B)");
    REQUIRE(n.body.goals.size() == 1);
    CHECK(term_text(n.body.goals[0].lhs) == "B");
    CHECK(term_text(n.body.goals[0].rhs) == "f(A)");
  }

  SECTION("repeated head variables keep only the first position") {
    Clause n = normalize_clause(clause_of("eq(A, A)."));
    CHECK(term_text(n.head) == "eq(A,B)");
    REQUIRE(n.body.goals.size() == 1);
    CHECK(term_text(n.body.goals[0].lhs) == "B");
    CHECK(term_text(n.body.goals[0].rhs) == "A");
  }

  SECTION("normalizing twice is the identity") {
    Clause once = normalize_clause(clause_of("p(g(Y), [X|Y]) :- s(X, Y)."));
    Clause twice = normalize_clause(once);
    CHECK(term_equal(once.head, twice.head));
    REQUIRE(once.body.goals.size() == twice.body.goals.size());
    for (std::size_t i = 0; i < once.body.goals.size(); ++i)
      CHECK(once.body.goals[i].kind == twice.body.goals[i].kind);
  }
}

TEST_CASE("variable collection follows first occurrence") {
  Module m = parse_module(
      ":- module(m, []).\np(X, Y) :- q(Z, X), (r(Y) ; s(W)).\n", "");
  const Clause& c = m.preds[0].clauses[0];
  CHECK(clause_vars(c) == std::vector<std::string>{"X", "Y", "Z", "W"});
  CHECK(body_vars(c.body) == std::vector<std::string>{"Z", "X", "Y", "W"});
}

TEST_CASE("variant recognizes renamings and nothing else") {
  CHECK(variant(parse_term_text("f(X,Y)"), parse_term_text("f(A,B)")));
  CHECK(variant(parse_term_text("f(X,X)"), parse_term_text("f(A,A)")));
  CHECK_FALSE(variant(parse_term_text("f(X,X)"), parse_term_text("f(A,B)")));
  CHECK_FALSE(variant(parse_term_text("f(X,Y)"), parse_term_text("f(A,A)")));
  CHECK_FALSE(variant(parse_term_text("f(X)"), parse_term_text("f(a)")));
  CHECK(variant(parse_term_text("[X,g(Y)|Z]"), parse_term_text("[P,g(Q)|R]")));
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_module(":- module(m, []).\np(a) :- .\n", "");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
}
