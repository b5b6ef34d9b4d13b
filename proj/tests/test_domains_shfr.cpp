// Sharing+freeness domain: lattice laws, soundness of the operations against
// a brute-force concrete oracle, and the text round-trip.
//
// The oracle enumerates actual substitutions over a small pool of shared
// variables.  A substitution is described by an abstract element when every
// actual sharing group is admitted and every variable claimed free really is
// unbound; all domain operations must preserve description.

#include <catch_amalgamated.hpp>

#include "semsearch/domain.hpp"
#include "semsearch/parser.hpp"
#include "semsearch/shfr.hpp"
#include "semsearch/subst.hpp"

#include <random>

using namespace semsearch;

namespace {

const std::vector<std::string> k_vars{"X", "Y", "Z"};

using Concrete = std::map<std::string, TermPtr>;

// candidate images share the pool variables u1..u3
std::vector<TermPtr> image_universe() {
  TermPtr u1 = make_var("u1"), u2 = make_var("u2"), u3 = make_var("u3");
  return {
      u1,
      u2,
      u3,
      make_atom("a"),
      make_struct("f", {u1}),
      make_struct("f", {u2}),
      make_struct("g", {u1, u2}),
      make_struct("f", {make_atom("a")}),
  };
}

std::vector<Concrete> substitution_universe() {
  auto imgs = image_universe();
  std::vector<Concrete> out;
  for (const auto& tx : imgs)
    for (const auto& ty : imgs)
      for (const auto& tz : imgs)
        out.push_back({{"X", tx}, {"Y", ty}, {"Z", tz}});
  return out;
}

struct Shape {
  SharingSet groups;
  VarSet free_vars;
};

Shape shape_of(const Concrete& th) {
  Shape s;
  std::map<std::string, std::set<std::string>> occ; // pool var -> program vars
  for (const auto& [v, t] : th) {
    for (const auto& u : term_vars(t)) occ[u].insert(v);
    if (t->is_var()) s.free_vars.insert(v);
  }
  for (auto& [u, g] : occ) {
    (void)u;
    s.groups.insert(g);
  }
  return s;
}

bool described_by(const Shape& s, const AbstractSubst& a) {
  if (a.bot) return false;
  for (const auto& g : s.groups)
    if (!a.sharing.count(g)) return false;
  for (const auto& v : a.free)
    if (!s.free_vars.count(v)) return false;
  return true;
}

AbstractSubst abstraction_of(const Concrete& th) {
  Shape s = shape_of(th);
  AbstractSubst a;
  a.dom = DomainId::Shfr;
  a.vars = k_vars;
  a.sharing = s.groups;
  a.free = s.free_vars;
  return a;
}

// every consistent element over X,Y,Z: any set of groups, any free subset
// of the variables that still have a group
std::vector<AbstractSubst> element_universe() {
  std::vector<std::set<std::string>> all_groups;
  for (std::size_t mask = 1; mask < 8; ++mask) {
    std::set<std::string> g;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask & (std::size_t{1} << i)) g.insert(k_vars[i]);
    all_groups.push_back(std::move(g));
  }
  std::vector<AbstractSubst> out;
  for (std::size_t sh = 0; sh < (std::size_t{1} << all_groups.size()); ++sh) {
    AbstractSubst base;
    base.dom = DomainId::Shfr;
    base.vars = k_vars;
    for (std::size_t i = 0; i < all_groups.size(); ++i)
      if (sh & (std::size_t{1} << i)) base.sharing.insert(all_groups[i]);
    std::vector<std::string> unground;
    for (const auto& v : k_vars) {
      for (const auto& g : base.sharing)
        if (g.count(v)) {
          unground.push_back(v);
          break;
        }
    }
    for (std::size_t fr = 0; fr < (std::size_t{1} << unground.size()); ++fr) {
      AbstractSubst a = base;
      for (std::size_t i = 0; i < unground.size(); ++i)
        if (fr & (std::size_t{1} << i)) a.free.insert(unground[i]);
      out.push_back(std::move(a));
    }
  }
  out.push_back(bottom_elem(DomainId::Shfr, k_vars));
  return out;
}

} // namespace

TEST_CASE("ordering is a partial order with bottom below everything") {
  auto elems = element_universe();
  std::mt19937 rng(7001);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);

  AbstractSubst bot = bottom_elem(DomainId::Shfr, k_vars);
  for (const auto& a : elems) {
    CHECK(shfr::leq(a, a));
    CHECK(shfr::leq(bot, a));
  }
  CHECK(shfr::equal(bot, bot));

  long cases = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto& a = elems[pick(rng)];
    const auto& b = elems[pick(rng)];
    const auto& c = elems[pick(rng)];
    if (shfr::leq(a, b) && shfr::leq(b, a)) CHECK(shfr::equal(a, b));
    if (shfr::equal(a, b)) CHECK((shfr::leq(a, b) && shfr::leq(b, a)));
    if (shfr::leq(a, b) && shfr::leq(b, c)) {
      CHECK(shfr::leq(a, c));
      ++cases;
    }
  }
  CHECK(cases > 100); // the sample actually exercised transitivity
}

TEST_CASE("join and meet are the extremal bounds") {
  auto elems = element_universe();
  std::mt19937 rng(7002);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);

  for (int i = 0; i < 1500; ++i) {
    const auto& a = elems[pick(rng)];
    const auto& b = elems[pick(rng)];
    const auto& c = elems[pick(rng)];

    AbstractSubst j = shfr::lub(a, b);
    CHECK(shfr::leq(a, j));
    CHECK(shfr::leq(b, j));
    if (shfr::leq(a, c) && shfr::leq(b, c)) CHECK(shfr::leq(j, c));

    AbstractSubst m = shfr::glb(a, b);
    CHECK(shfr::leq(m, a));
    CHECK(shfr::leq(m, b));
    if (shfr::leq(c, a) && shfr::leq(c, b)) CHECK(shfr::leq(c, m));

    bool exact = false;
    AbstractSubst je = shfr::lub_exact(a, b, exact);
    CHECK(shfr::equal(je, j));
    if (shfr::leq(a, b) || shfr::leq(b, a)) CHECK(exact);

    CHECK(shfr::equal(shfr::widen(a, b), j));
  }

  // meeting free with ground collapses to bottom
  AbstractSubst fr = shfr::parse(k_vars, "(mshare([[X,Y]]),var(X))");
  AbstractSubst gr = shfr::parse(k_vars, "(mshare([[X],[Y]]))");
  CHECK(shfr::glb(fr, gr).bot);
}

TEST_CASE("description survives ordering, join and meet") {
  auto elems = element_universe();
  auto subs = substitution_universe();
  std::vector<Shape> shapes;
  shapes.reserve(subs.size());
  for (const auto& th : subs) shapes.push_back(shape_of(th));

  std::mt19937 rng(7003);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);

  for (const auto& th : subs)
    CHECK(described_by(shape_of(th), abstraction_of(th)));

  long hits = 0;
  for (int i = 0; i < 300; ++i) {
    const auto& a = elems[pick(rng)];
    const auto& b = elems[pick(rng)];
    bool a_leq_b = shfr::leq(a, b);
    AbstractSubst j = shfr::lub(a, b);
    AbstractSubst m = shfr::glb(a, b);
    for (const auto& s : shapes) {
      bool in_a = described_by(s, a);
      bool in_b = described_by(s, b);
      if (in_a) {
        ++hits;
        if (a_leq_b) CHECK(described_by(s, b));
        CHECK(described_by(s, j));
      }
      if (in_b) CHECK(described_by(s, j));
      if (in_a && in_b) CHECK(described_by(s, m));
    }
  }
  CHECK(hits > 1000);
}

TEST_CASE("abstract unification covers every concrete unifier") {
  auto subs = substitution_universe();
  std::vector<std::pair<TermPtr, TermPtr>> eqs = {
      {parse_term_text("X"), parse_term_text("Y")},
      {parse_term_text("X"), parse_term_text("f(Y)")},
      {parse_term_text("X"), parse_term_text("a")},
      {parse_term_text("X"), parse_term_text("f(X)")},
      {parse_term_text("f(X,Y)"), parse_term_text("f(Y,Z)")},
      {parse_term_text("g(X,X)"), parse_term_text("g(f(Y),Z)")},
      {parse_term_text("X"), parse_term_text("g(Y,Z)")},
  };

  long covered = 0;
  for (const auto& th : subs) {
    AbstractSubst a = abstraction_of(th);
    for (const auto& [l, r] : eqs) {
      AbstractSubst au = shfr::amgu(a, l, r);

      Subst s;
      s.bind = th;
      bool ok = unify(l, r, s);
      if (!ok) continue; // nothing concrete to cover

      // abstract failure would wrongly rule out this unifier
      REQUIRE_FALSE(au.bot);
      Concrete after;
      for (const auto& v : k_vars) after[v] = s.apply(make_var(v));
      CHECK(described_by(shape_of(after), au));
      ++covered;
    }
  }
  CHECK(covered >= 1000);
}

TEST_CASE("freeness sharpens abstract unification") {
  // binding a known-free variable skips the star closure: Y and Z are not
  // conflated through X
  AbstractSubst distinct =
      shfr::parse(k_vars, "(mshare([[X],[Y],[Z]]),var(X),var(Y),var(Z))");
  AbstractSubst bound =
      shfr::amgu(distinct, parse_term_text("X"), parse_term_text("g(Y,Z)"));
  SharingSet expect_free{{"X", "Y"}, {"X", "Z"}};
  CHECK(bound.sharing == expect_free);

  AbstractSubst nofree = shfr::parse(k_vars, "(mshare([[X],[Y],[Z]]))");
  AbstractSubst bound2 =
      shfr::amgu(nofree, parse_term_text("X"), parse_term_text("g(Y,Z)"));
  SharingSet expect_closed{{"X", "Y"}, {"X", "Z"}, {"X", "Y", "Z"}};
  CHECK(bound2.sharing == expect_closed);

  // aliasing two free variables keeps both free
  std::vector<std::string> xy{"X", "Y"};
  AbstractSubst two = shfr::top(xy);
  two.free = {"X", "Y"};
  AbstractSubst aliased = shfr::amgu(two, parse_term_text("X"), parse_term_text("Y"));
  CHECK(shfr::text(aliased) == "(mshare([[X,Y]]),var(X),var(Y))");

  // grounding erases freeness of everything that shared with the variable
  AbstractSubst grounded = shfr::amgu(two, parse_term_text("X"), parse_term_text("a"));
  CHECK(shfr::text(grounded) == "(mshare([[Y]]),ground(X))");

  // functor clash is definite failure
  CHECK(shfr::amgu(two, parse_term_text("f(X)"), parse_term_text("g(Y)")).bot);
}

TEST_CASE("success descriptions filter the call state") {
  std::vector<std::string> xy{"X", "Y"};
  AbstractSubst call =
      shfr::parse(xy, "(mshare([[X],[Y],[X,Y]]),var(X),var(Y))");
  std::vector<TermPtr> actuals{parse_term_text("X")};

  SECTION("a grounding callee grounds the argument and unfrees its aliases") {
    AbstractSubst succ = shfr::empty({"A"});
    AbstractSubst r = shfr::apply_call_success(call, actuals, succ);
    // Y may have been the variable X was aliased to, so it cannot stay free
    CHECK(shfr::text(r) == "(mshare([[Y]]),ground(X))");
  }

  SECTION("an alias-independent variable keeps its freeness") {
    AbstractSubst apart =
        shfr::parse(xy, "(mshare([[X],[Y]]),var(X),var(Y))");
    AbstractSubst r =
        shfr::apply_call_success(apart, actuals, shfr::empty({"A"}));
    CHECK(shfr::text(r) == "(mshare([[Y]]),var(Y),ground(X))");
  }

  SECTION("a callee that leaves its argument free changes nothing") {
    AbstractSubst succ = shfr::parse({"A"}, "(mshare([[A]]),var(A))");
    AbstractSubst r = shfr::apply_call_success(call, actuals, succ);
    CHECK(shfr::equal(r, call));
  }

  SECTION("a callee that binds without grounding drops freeness only") {
    AbstractSubst succ = shfr::parse({"A"}, "(mshare([[A]]))");
    AbstractSubst r = shfr::apply_call_success(call, actuals, succ);
    CHECK(shfr::text(r) == "(mshare([[X],[X,Y],[Y]]))");
  }

  SECTION("bottom success means the call cannot return") {
    AbstractSubst r = shfr::apply_call_success(
        call, actuals, bottom_elem(DomainId::Shfr, {"A"}));
    CHECK(r.bot);
  }

  SECTION("arity mismatches are programming errors") {
    AbstractSubst succ = shfr::empty({"A", "B"});
    CHECK_THROWS_AS(shfr::apply_call_success(call, actuals, succ),
                    std::logic_error);
  }
}

TEST_CASE("success combination never loses a concrete outcome") {
  // concrete scenario: p(W) grounds its argument (like W = a).  Calling
  // p(X) from any state described by the call element must land in a state
  // described by the combination.
  auto subs = substitution_universe();
  AbstractSubst succ = shfr::empty({"A"});
  std::vector<TermPtr> actuals{parse_term_text("X")};
  long checked = 0;
  for (const auto& th : subs) {
    AbstractSubst call = abstraction_of(th);
    Subst s;
    s.bind = th;
    if (!unify(parse_term_text("X"), make_atom("a"), s)) continue;
    Concrete after;
    for (const auto& v : k_vars) after[v] = s.apply(make_var(v));
    AbstractSubst r = shfr::apply_call_success(call, actuals, succ);
    CHECK(described_by(shape_of(after), r));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("variable bookkeeping: extend, project, rename") {
  AbstractSubst a =
      shfr::parse(k_vars, "(mshare([[X,Y]]),var(X),ground(Z))");

  AbstractSubst e = shfr::extend(a, {"W", "X"}); // X already present
  REQUIRE(e.vars.size() == 4);
  CHECK(e.sharing.count({"W"}) == 1);
  CHECK(e.free.count("W") == 1);
  CHECK(shfr::equal(shfr::project(e, k_vars), a));

  AbstractSubst p = shfr::project(a, {"X"});
  CHECK(shfr::text(p) == "(mshare([[X]]),var(X))");

  std::map<std::string, std::string> swap{{"X", "Y"}, {"Y", "X"}};
  AbstractSubst r = shfr::rename(a, swap);
  CHECK(r.free.count("Y") == 1);
  CHECK(shfr::equal(shfr::rename(r, swap), a));
}

TEST_CASE("element text round-trips for the whole universe") {
  for (const auto& a : element_universe()) {
    std::string t = shfr::text(a);
    CHECK(t.find(' ') == std::string::npos); // dump lines split on blanks
    AbstractSubst back = shfr::parse(k_vars, t);
    CHECK(shfr::equal(back, a));
  }
  CHECK(shfr::text(bottom_elem(DomainId::Shfr, k_vars)) == "bot");
  CHECK(shfr::text(shfr::empty(k_vars)) ==
        "(mshare([]),ground(X),ground(Y),ground(Z))");

  CHECK_THROWS(shfr::parse(k_vars, "(mshare([[Q]]))"));
  CHECK_THROWS(shfr::parse(k_vars, "(mshare([[X]]),ground(X))"));
  CHECK_THROWS(shfr::parse(k_vars, "(mshare([[X]])"));
}

TEST_CASE("top is guarded against variable blowup") {
  std::vector<std::string> many;
  for (int i = 0; i < 21; ++i) many.push_back("V" + std::to_string(i));
  CHECK_THROWS_AS(shfr::top(many), std::logic_error);
}

TEST_CASE("the domain facade dispatches to the same operations") {
  Dom d; // sharing domain needs no type table
  CHECK(d.id == DomainId::Shfr);
  AbstractSubst t = d.top(k_vars);
  CHECK(shfr::equal(t, shfr::top(k_vars)));
  CHECK(d.is_top(t));
  CHECK(d.bottom(k_vars).bot);
  AbstractSubst a = d.parse_elem(k_vars, "(mshare([[X,Y]]),var(Y))");
  CHECK(d.leq(a, t));
  CHECK_FALSE(d.leq(t, a));
  CHECK(d.text(a) == "(mshare([[X,Y]]),var(Y))");
  CHECK(d.equal(d.lub(a, t), t));
  CHECK(d.equal(d.glb(a, t), a));
}
