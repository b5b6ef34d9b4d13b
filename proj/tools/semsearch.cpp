// Command line front end: builds analysis dumps for a corpus of modules
// (index), evaluates assertion-shaped search queries against them (find),
// prints stored results as assertions (show), and runs the concrete
// interpreter on a goal (solve, hidden debugging aid).
//
// Exit codes
//   index: 0 all modules indexed, 4 some failed, 2 configuration error
//   find:  0 matches found, 1 none, 2 bad query, 3 missing cache
//   show:  0 printed, 3 no dump for the module

#include "semsearch/matcher.hpp"
#include "semsearch/solve.hpp"
#include "semsearch/store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace semsearch;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::string module_name_of(const std::filesystem::path& p) {
  return p.stem().string();
}

bool parse_domains(const std::string& csv, std::vector<DomainId>& out) {
  out.clear();
  for (const std::string& part : semsearch::detail::split_on(csv, ',')) {
    DomainId d;
    if (!domain_from_name(part, d)) return false;
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  return !out.empty();
}

// ---------------------------------------------------------------------------

struct SourceSet {
  ModuleMap mods;
  std::map<std::string, std::string> paths;  // module -> path as given
  std::map<std::string, std::string> hashes; // module -> source hash
};

int cmd_index(const std::vector<std::string>& files, const std::string& cache,
              const std::vector<DomainId>& domains) {
  SourceSet src;
  bool partial = false;

  std::vector<std::string> order; // module processing order = file order
  for (const std::string& f : files) {
    try {
      std::string text = read_file(f);
      Module m = parse_module(text, module_name_of(f));
      m.source_hash = sha256_hex(text);
      if (src.mods.count(m.name)) {
        std::cerr << "failed " << f << ": duplicate module " << m.name << "\n";
        partial = true;
        continue;
      }
      src.paths[m.name] = f;
      src.hashes[m.name] = m.source_hash;
      order.push_back(m.name);
      src.mods.emplace(m.name, std::move(m));
    } catch (const std::exception& e) {
      std::cerr << "failed " << f << ": " << e.what() << "\n";
      partial = true;
    }
  }
  if (order.empty()) {
    std::cerr << "nothing to index\n";
    return 2;
  }

  CorpusStore store{cache};
  std::vector<IndexEntry> entries;

  for (const std::string& name : order) {
    const Module& m = src.mods.at(name);
    IndexEntry e;
    e.module = name;
    e.path = src.paths.at(name);
    e.hash = src.hashes.at(name);
    for (const auto& [pn, pa] : m.exported_preds())
      e.exports.push_back(pn + "/" + std::to_string(pa));

    std::set<std::string> kws;
    for (const auto& [pn, pa] : m.exported_preds()) {
      (void)pa;
      kws.insert(detail::lowercased(pn));
    }
    for (const Assertion& a : m.assertions) {
      std::string word;
      for (char c : a.doc) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
          word.push_back(static_cast<char>(
              std::tolower(static_cast<unsigned char>(c))));
        } else if (!word.empty()) {
          kws.insert(word);
          word.clear();
        }
      }
      if (!word.empty()) kws.insert(word);
    }
    e.keywords.assign(kws.begin(), kws.end());

    std::cout << "indexed " << name;
    for (DomainId d : domains) {
      auto t0 = std::chrono::steady_clock::now();
      try {
        AnalysisResult r = analyze_module(src.mods, m, d);
        store.save(r, m.source_hash);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        auto size =
            std::filesystem::file_size(store.dir() / dump_filename(name, d));
        e.domains.push_back(domain_name(d));
        std::cout << " [" << domain_name(d) << " " << ms << "ms " << size
                  << "B]";
      } catch (const std::exception& ex) {
        std::cout << "\n";
        std::cerr << "failed " << name << " (" << domain_name(d)
                  << "): " << ex.what() << "\n";
        partial = true;
        goto next_module;
      }
    }
    std::cout << "\n";
  next_module:
    if (!e.domains.empty()) entries.push_back(std::move(e));
  }

  try {
    store.write_index(entries);
  } catch (const std::exception& e) {
    std::cerr << "cannot write index: " << e.what() << "\n";
    return 2;
  }
  return partial ? 4 : 0;
}

// ---------------------------------------------------------------------------

std::string verdict_text(const Verdict& v) {
  std::string s = status_name(v.status);
  if (v.note != Note::None) s += " (" + note_name(v.note) + ")";
  return s;
}

void print_human(const std::vector<MatchResult>& results) {
  for (const MatchResult& r : results) {
    std::cout << r.module << ":" << r.pred << "/" << r.arity << " "
              << status_name(r.status) << "\n";
    for (const ConditionResult& c : r.residue) {
      std::cout << "  " << c.text << " ";
      for (const DomainVerdict& dv : c.verdicts)
        std::cout << " [" << domain_name(dv.domain) << ": "
                  << verdict_text(dv.verdict) << "]";
      std::cout << " => " << status_name(c.combined) << "\n";
    }
  }
}

void print_machine(const std::vector<MatchResult>& results) {
  std::cout << "semsearch-find 1\n";
  for (const MatchResult& r : results) {
    nlohmann::json j;
    j["module"] = r.module;
    j["pred"] = r.pred;
    j["arity"] = r.arity;
    j["status"] = status_name(r.status);
    nlohmann::json residue = nlohmann::json::array();
    for (const ConditionResult& c : r.residue) {
      nlohmann::json cj;
      cj["cond"] = c.text;
      cj["combined"] = status_name(c.combined);
      nlohmann::json vs = nlohmann::json::array();
      for (const DomainVerdict& dv : c.verdicts) {
        nlohmann::json vj;
        vj["domain"] = domain_name(dv.domain);
        vj["status"] = status_name(dv.verdict.status);
        vj["note"] = note_name(dv.verdict.note);
        vs.push_back(std::move(vj));
      }
      cj["verdicts"] = std::move(vs);
      residue.push_back(std::move(cj));
    }
    j["residue"] = std::move(residue);
    std::cout << j.dump() << "\n";
  }
}

int cmd_find(const std::string& query_arg, const std::string& cache,
             const std::vector<DomainId>& domains, const std::string& status,
             bool refine, const std::string& format,
             const std::vector<std::string>& keywords) {
  CorpusStore store{cache};
  if (!store.exists()) {
    std::cerr << "no index in " << cache << " (run 'semsearch index' first)\n";
    return 3;
  }

  std::string query_text = query_arg;
  std::error_code ec;
  if (std::filesystem::exists(query_arg, ec)) query_text = read_file(query_arg);

  PredicateQuery query;
  try {
    query = parse_query(query_text);
  } catch (const QueryError& e) {
    std::cerr << "bad query: " << e.what() << "\n";
    return 2;
  }

  FindOptions opts;
  opts.domains = domains;
  opts.keywords = keywords;
  opts.refine = refine;
  if (!status.empty()) {
    auto st = status_from_name(status);
    if (!st) {
      std::cerr << "bad --status '" << status << "'\n";
      return 2;
    }
    opts.required_status = st;
  }

  SourceSet src;
  Corpus corpus;
  std::vector<IndexEntry> index;
  try {
    index = store.read_index();
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }

  for (const IndexEntry& e : index) {
    std::string text;
    try {
      text = read_file(e.path);
    } catch (const std::exception& ex) {
      std::cerr << "warning: skipping " << e.module << ": " << ex.what()
                << "\n";
      continue;
    }
    if (sha256_hex(text) != e.hash)
      std::cerr << "warning: " << e.path << " changed since indexing\n";
    try {
      Module m = parse_module(text, e.module);
      m.source_hash = e.hash;
      src.mods.emplace(m.name, std::move(m));
    } catch (const std::exception& ex) {
      std::cerr << "warning: skipping " << e.module << ": " << ex.what()
                << "\n";
      continue;
    }
    for (DomainId d : domains)
      if (const LoadedDump* dump = store.load(e.module, d))
        corpus.emplace(std::pair<std::string, DomainId>{e.module, d},
                       dump->result);
  }

  std::vector<MatchResult> results;
  try {
    results = findp(src.mods, corpus, query, opts);
    if (refine) refine_and_recheck(src.mods, query, results, opts);
  } catch (const std::exception& e) {
    std::cerr << "find failed: " << e.what() << "\n";
    return 2;
  }

  if (format == "machine") print_machine(results);
  else print_human(results);
  return results.empty() ? 1 : 0;
}

// ---------------------------------------------------------------------------

// loaded shapes elements always present var types as names or leaves
std::string prop_style(const Dom& dom, const AbstractSubst& a) {
  if (a.bot) return "fails";
  if (dom.id == DomainId::Shfr) return shfr::text(a);
  std::string s = "(";
  bool first = true;
  for (const auto& v : a.vars) {
    if (!first) s += ",";
    first = false;
    s += dom.tt().display_text(a.ty.at(v)) + "(" + v + ")";
  }
  return s + ")";
}

int cmd_show(const std::string& module, const std::string& cache,
             const std::vector<DomainId>& domains) {
  CorpusStore store{cache};
  bool any = false;
  for (DomainId d : domains) {
    const LoadedDump* dump = store.load(module, d);
    if (!dump) continue;
    any = true;
    const AnalysisResult& r = dump->result;
    Dom dom(r.domain, r.types.get());
    std::cout << "% module " << r.module << ", domain " << domain_name(d)
              << "\n";
    for (const auto& [name, body] : r.typedefs)
      std::cout << "% typedef " << name << " " << body << "\n";
    for (const auto& [pred, elem] : r.entries)
      std::cout << "% entry " << pred.name << "/" << pred.arity << " "
                << prop_style(dom, elem) << "\n";
    for (const Triple& t : r.triples) {
      std::string head = t.pred.name;
      auto vars = canon_vars(t.pred.arity);
      if (!vars.empty()) {
        head += "(";
        for (std::size_t i = 0; i < vars.size(); ++i)
          head += (i ? "," : "") + vars[i];
        head += ")";
      }
      std::cout << ":- true pred " << head;
      if (!dom.is_top(t.call)) std::cout << " : " << prop_style(dom, t.call);
      std::cout << " => " << prop_style(dom, t.succ) << ".\n";
    }
    std::cout << "\n";
  }
  if (!any) {
    std::cerr << "no dump for module " << module << " in " << cache << "\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& file, const std::string& goal_text,
              std::size_t max_steps) {
  Module m;
  try {
    m = parse_module(read_file(file), module_name_of(file));
  } catch (const std::exception& e) {
    std::cerr << "cannot load " << file << ": " << e.what() << "\n";
    return 2;
  }
  ModuleMap mods;
  std::string name = m.name;
  mods.emplace(name, std::move(m));

  Body goal;
  try {
    goal = parse_goal(goal_text);
  } catch (const std::exception& e) {
    std::cerr << "bad goal: " << e.what() << "\n";
    return 2;
  }

  Interp interp(mods, SolveOptions{max_steps});
  SolveResult res = interp.solve(goal, name);
  for (const Answer& a : res.answers) {
    if (a.bindings.empty()) {
      std::cout << "yes\n";
      continue;
    }
    bool first = true;
    for (const auto& [v, t] : a.bindings) {
      std::cout << (first ? "" : ", ") << v << " = " << term_text(t);
      first = false;
    }
    std::cout << "\n";
  }
  if (res.answers.empty()) std::cout << (res.complete ? "no\n" : "unknown\n");
  else if (!res.complete) std::cout << "incomplete\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic search over analyzed logic modules"};
  app.require_subcommand(1);

  std::string cache = std::getenv("SEMSEARCH_CACHE")
                          ? std::getenv("SEMSEARCH_CACHE")
                          : "cache";
  std::string domains_csv = "shfr,shapes";

  // index
  auto* index = app.add_subcommand("index", "analyze modules into a cache");
  std::vector<std::string> files;
  index->add_option("files", files, "module source files")->required();
  index->add_option("--cache", cache, "cache directory");
  index->add_option("--domains", domains_csv, "comma separated domain list");

  // find
  auto* find = app.add_subcommand("find", "search predicates by assertion");
  std::string query, status, format = "human";
  std::vector<std::string> keywords;
  bool refine = false;
  find->add_option("query", query, "findp goal, assertion block, or file")
      ->required();
  find->add_option("--cache", cache, "cache directory");
  find->add_option("--domains", domains_csv, "comma separated domain list");
  find->add_option("--status", status, "only results with this status");
  find->add_option("--format", format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));
  find->add_option("--keyword", keywords, "require a keyword (repeatable)");
  find->add_flag("--refine", refine, "re-analyze candidates with the query");

  // show
  auto* show = app.add_subcommand("show", "print stored analysis results");
  std::string show_module;
  show->add_option("module", show_module, "module name")->required();
  show->add_option("--cache", cache, "cache directory");
  show->add_option("--domains", domains_csv, "comma separated domain list");

  // solve (hidden): run the concrete interpreter
  auto* solve = app.add_subcommand("solve", "run a goal concretely");
  solve->group(""); // hidden
  std::string solve_file, solve_goal;
  std::size_t solve_steps = 10000;
  solve->add_option("file", solve_file, "module source file")->required();
  solve->add_option("goal", solve_goal, "goal text")->required();
  solve->add_option("--steps", solve_steps, "resolution step budget");

  CLI11_PARSE(app, argc, argv);

  std::vector<DomainId> domains;
  if (!parse_domains(domains_csv, domains)) {
    std::cerr << "bad --domains '" << domains_csv << "'\n";
    return 2;
  }

  try {
    if (index->parsed()) return cmd_index(files, cache, domains);
    if (find->parsed())
      return cmd_find(query, cache, domains, status, refine, format, keywords);
    if (show->parsed()) return cmd_show(show_module, cache, domains);
    if (solve->parsed()) return cmd_solve(solve_file, solve_goal, solve_steps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
