// Dump and index serialization: byte-identical round trips, recursive
// typedefs, rejection of malformed inputs, and the on-disk corpus store
// with its freshness check.

#include <catch_amalgamated.hpp>

#include "semsearch/analysis.hpp"
#include "semsearch/parser.hpp"
#include "semsearch/sha256.hpp"
#include "semsearch/store.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace semsearch;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fixture {
  ModuleMap mods;
  std::map<std::string, std::string> sources;

  explicit Fixture(const std::vector<std::string>& files) {
    for (const auto& f : files) {
      std::string src = slurp(std::string(FIXTURES_DIR) + "/" + f);
      Module m = parse_module(src, f);
      sources[m.name] = src;
      std::string name = m.name;
      mods.emplace(std::move(name), std::move(m));
    }
  }
};

void check_roundtrip(const AnalysisResult& res, const std::string& hash) {
  std::string once = render_dump(res, hash);
  LoadedDump loaded = parse_dump(once);
  CHECK(loaded.source_hash == hash);
  CHECK(loaded.result.module == res.module);
  CHECK(loaded.result.domain == res.domain);
  CHECK(loaded.result.entries.size() == res.entries.size());
  CHECK(loaded.result.triples.size() == res.triples.size());
  CHECK(loaded.result.typedefs == res.typedefs);
  std::string twice = render_dump(loaded.result, loaded.source_hash);
  if (once != twice) {
    CAPTURE(res.module, domain_name(res.domain));
    CHECK(once == twice);
  }
}

std::string random_fact_term(std::mt19937& rng) {
  static const char* consts[] = {"a", "b", "c", "0", "1", "-4"};
  auto c = [&] { return consts[rng() % 6]; };
  switch (rng() % 9) {
    case 0: return c();
    case 1: return std::string("f(") + c() + ")";
    case 2: return std::string("g(") + c() + ", " + c() + ")";
    case 3: return std::string("[") + c() + "]";
    case 4: return std::string("[") + c() + ", " + c() + "]";
    case 5: return "X";
    case 6: return "f(X)";
    case 7: return "X-Y";
    default: return std::string("[") + c() + "|Y]";
  }
}

std::string random_program(std::mt19937& rng, int idx) {
  static const char* bodies[] = {
      "k0(A), k1(A, B)",
      "k1(A, B)",
      "k1(A, C), k1(C, B)",
      "k0(A), A = B",
      "k1(B, A)",
      "k0(A), k0(C), B = g(A, C)",
      "k1(A, C), B = f(C)",
      "k0(A), succ(1, B)",
  };
  std::string name = "rs" + std::to_string(idx);
  std::string src = ":- module(" + name + ", [r0/2], []).\n";
  for (int i = 0; i < 3; ++i)
    src += "k0(" + random_fact_term(rng) + ").\n";
  for (int i = 0; i < 3; ++i)
    src += "k1(" + random_fact_term(rng) + ", " + random_fact_term(rng) + ").\n";
  src += std::string("r0(A, B) :- ") + bodies[rng() % 8] + ".\n";
  if (rng() % 2) src += std::string("r0(A, B) :- ") + bodies[rng() % 8] + ".\n";
  return src;
}

} // namespace

TEST_CASE("fixture analyses round-trip through the dump format") {
  Fixture fx({"fig1.pl", "lists.pl", "simple.pl", "ugraphs.pl"});
  for (const char* name : {"fig1", "lists", "simple", "ugraphs"}) {
    const Module& m = *find_module(fx.mods, name);
    for (DomainId d : {DomainId::Shfr, DomainId::Shapes}) {
      AnalysisResult res = analyze_module(fx.mods, m, d);
      check_roundtrip(res, sha256_hex(fx.sources.at(name)));
    }
  }
}

TEST_CASE("the dump layout matches its documented line shape") {
  Fixture fx({"simple.pl"});
  AnalysisResult res =
      analyze_module(fx.mods, *find_module(fx.mods, "simple"), DomainId::Shapes);
  std::string hash = sha256_hex(fx.sources.at("simple"));
  std::string dump = render_dump(res, hash);

  std::istringstream is(dump);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);

  REQUIRE(lines.size() >= 6);
  CHECK(lines[0] == "semsearch-dump 1 sha256");
  CHECK(lines[1] == "module simple");
  CHECK(lines[2] == "hash " + hash);
  CHECK(lines[3] == "domain shapes");
  CHECK(lines[4] == "created 0");
  CHECK(lines[5] == "typedef b ('b0'|'b1')");

  // element texts must stay space-free or the line format breaks
  for (const auto& l : lines) {
    if (l.rfind("entry ", 0) == 0)
      CHECK(detail::split_ws(l).size() == 3);
    if (l.rfind("triple ", 0) == 0)
      CHECK(detail::split_ws(l).size() == 7);
  }
}

TEST_CASE("a hundred random analyses survive the round trip") {
  std::mt19937 rng(77002);
  for (int i = 0; i < 50; ++i) {
    std::string src = random_program(rng, i);
    CAPTURE(src);
    Module m = parse_module(src, "rs");
    ModuleMap mods;
    std::string name = m.name;
    const Module& ref = mods.emplace(name, std::move(m)).first->second;
    for (DomainId d : {DomainId::Shfr, DomainId::Shapes})
      check_roundtrip(analyze_module(mods, ref, d), sha256_hex(src));
  }
}

TEST_CASE("failing variants and recursive typedefs round-trip") {
  SECTION("sharing dump with a bottom success") {
    AnalysisResult res;
    res.module = "m";
    res.domain = DomainId::Shfr;
    res.types = std::make_shared<TypeTable>();
    res.entries.emplace_back(PredId{"m", "p", 1},
                             shfr::parse({"A"}, "(mshare([[A]]),var(A))"));
    res.triples.push_back(Triple{PredId{"m", "p", 1}, 0,
                                 shfr::parse({"A"}, "(mshare([[A]]),var(A))"),
                                 bottom_elem(DomainId::Shfr, {"A"})});
    std::string dump = render_dump(res, "cafe");
    CHECK(dump.find("succ bot\n") != std::string::npos);
    check_roundtrip(res, "cafe");
  }

  SECTION("shape dump with recursion and a negative constant") {
    AnalysisResult res;
    res.module = "m";
    res.domain = DomainId::Shapes;
    res.types = std::make_shared<TypeTable>();
    TypeTable& tt = *res.types;
    shapes::TypeBinder boot(tt); // the builtin list type, as the analyzer has
    int nat = tt.alloc_named("nat");
    tt.define(nat, tt.union_of({tt.atom_const("z"),
                                tt.cons("s", {nat})}));
    res.typedefs.emplace_back("nat", tt.text(nat));
    res.entries.emplace_back(PredId{"m", "p", 2},
                             shapes::parse(tt, {"A", "B"}, "(A:nat,B:-3)"));
    res.triples.push_back(
        Triple{PredId{"m", "p", 2}, 0,
               shapes::parse(tt, {"A", "B"}, "(A:nat,B:-3)"),
               shapes::parse(tt, {"A", "B"}, "(A:s(nat),B:[term|list])")});
    check_roundtrip(res, "beef");

    LoadedDump loaded = parse_dump(render_dump(res, "beef"));
    const TypeTable& lt = *loaded.result.types;
    int lnat = *lt.named("nat");
    CHECK(lt.member(make_struct("s", {make_atom("z")}), lnat));
    CHECK(!lt.member(make_atom("q"), lnat));
  }
}

TEST_CASE("malformed dumps are rejected with a reason") {
  const std::string good =
      "semsearch-dump 1 sha256\n"
      "module m\n"
      "hash 00\n"
      "domain shfr\n"
      "created 0\n"
      "entry p/1 (mshare([[A]]),var(A))\n"
      "triple p/1 0 call (mshare([[A]]),var(A)) succ bot\n";
  CHECK(parse_dump(good).result.module == "m");

  CHECK_THROWS_AS(parse_dump("semsearch-dump 2 sha256\nmodule m\n"),
                  StoreError);
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "domain pony\n"),
                  StoreError);
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "typedef lonely\n"),
                  StoreError);
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "frobnicate 3\n"),
                  StoreError);
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nhash 00\n"),
                  StoreError); // no module
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "entry p/1\n"),
                  StoreError);
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "entry p (mshare([[A]]))\n"),
                  StoreError); // spec without arity
  CHECK_THROWS_AS(parse_dump("semsearch-dump 1 sha256\nmodule m\n"
                             "triple p/1 0 (mshare([[A]])) succ bot\n"),
                  StoreError); // missing the call marker
}

TEST_CASE("the index is sorted, complete and parseable") {
  IndexEntry lists;
  lists.module = "lists";
  lists.path = "fixtures/lists.pl";
  lists.hash = "aa11";
  lists.domains = {"shfr", "shapes"};
  lists.exports = {"length/2", "append/3"};
  lists.keywords = {"concatenation", "length"};

  IndexEntry fig1;
  fig1.module = "fig1";
  fig1.path = "fixtures/fig1.pl";
  fig1.hash = "bb22";
  fig1.domains = {"shfr"};
  fig1.exports = {"my_length/2"};

  std::string text = render_index({lists, fig1}); // deliberately unsorted
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line == "semsearch-index 1");
  std::getline(is, line);
  CHECK(line.rfind("module fig1 ", 0) == 0); // sorted by module name

  std::vector<IndexEntry> back = parse_index(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].module == "fig1");
  CHECK(back[0].keywords.empty());
  CHECK(back[1].module == "lists");
  CHECK(back[1].path == "fixtures/lists.pl");
  CHECK(back[1].hash == "aa11");
  CHECK(back[1].domains == std::vector<std::string>{"shfr", "shapes"});
  CHECK(back[1].exports == std::vector<std::string>{"length/2", "append/3"});
  CHECK(back[1].keywords ==
        std::vector<std::string>{"concatenation", "length"});

  CHECK_THROWS_AS(parse_index("not an index\n"), StoreError);
  CHECK_THROWS_AS(parse_index("semsearch-index 1\npath x hash y\n"),
                  StoreError);
}

TEST_CASE("the corpus store persists dumps and notices source changes") {
  namespace fs = std::filesystem;
  std::mt19937 rng(std::random_device{}());
  fs::path dir = fs::temp_directory_path() /
                 ("semsearch_store_" + std::to_string(rng()));
  fs::remove_all(dir);

  Fixture fx({"fig1.pl", "lists.pl"});
  const Module& fig1 = *find_module(fx.mods, "fig1");
  std::string hash = sha256_hex(fx.sources.at("fig1"));

  CorpusStore store(dir);
  CHECK(!store.exists());
  CHECK(!store.has_dump("fig1", DomainId::Shfr));
  CHECK(store.load("fig1", DomainId::Shfr) == nullptr);
  CHECK_THROWS_AS(store.read_index(), StoreError);

  AnalysisResult res = analyze_module(fx.mods, fig1, DomainId::Shfr);
  store.save(res, hash);
  CHECK(store.has_dump("fig1", DomainId::Shfr));
  CHECK(!store.has_dump("fig1", DomainId::Shapes));

  SECTION("writes leave no temporary files behind") {
    int tmp_files = 0;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".tmp") ++tmp_files;
    CHECK(tmp_files == 0);
  }

  SECTION("loading returns what was saved") {
    const LoadedDump* d = store.load("fig1", DomainId::Shfr);
    REQUIRE(d != nullptr);
    CHECK(d->result.module == "fig1");
    CHECK(d->result.triples.size() == res.triples.size());
    CHECK(store.load("fig1", DomainId::Shfr) == d); // cached
  }

  SECTION("freshness tracks the source hash") {
    CHECK(store.fresh("fig1", DomainId::Shfr, hash));
    CHECK(!store.fresh("fig1", DomainId::Shfr, "0123"));
    CHECK(!store.fresh("lists", DomainId::Shfr, hash)); // never saved

    store.save(res, "0123"); // the source "changed"
    CHECK(!store.fresh("fig1", DomainId::Shfr, hash));
    CHECK(store.fresh("fig1", DomainId::Shfr, "0123"));
  }

  SECTION("the index file is what read_index reads back") {
    IndexEntry e;
    e.module = "fig1";
    e.path = "fig1.pl";
    e.hash = hash;
    e.domains = {"shfr"};
    e.exports = {"my_length/2", "get_length/2", "check_length/2",
                 "gen_list/2"};
    store.write_index({e});
    CHECK(store.exists());
    auto back = store.read_index();
    REQUIRE(back.size() == 1);
    CHECK(back[0].module == "fig1");
    CHECK(back[0].hash == hash);
  }

  fs::remove_all(dir);
}
