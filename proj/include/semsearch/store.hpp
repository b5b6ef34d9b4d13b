#pragma once

// On-disk dump format for analysis results, one file per (module, domain),
// plus a corpus index.  Everything is line-oriented text so dumps diff
// cleanly and byte-identical reruns are easy to verify:
//
//   semsearch-dump 1 sha256
//   module lists
//   hash <hex sha-256 of the module source>
//   domain shapes
//   created 0
//   typedef t1 ([]|[int|t1])
//   entry length/2 (A:list,B:term)
//   triple length/2 0 call (A:list,B:term) succ (A:list,B:int)
//
// Element texts never contain spaces, so fields split on single blanks.
// Writes go through a temp file and a rename; a reader never observes a
// half-written dump.  The `created` field is pinned to 0: dumps depend on
// nothing but module source and analyzer version.

#include "analysis.hpp"
#include "sha256.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace semsearch {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexEntry {
  std::string module;
  std::string path; // source path as given to the indexer
  std::string hash;
  std::vector<std::string> domains;
  std::vector<std::string> exports;  // name/arity texts
  std::vector<std::string> keywords; // lowercased, sorted, deduped
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::pair<std::string, std::size_t> split_spec(const std::string& s) {
  std::size_t slash = s.rfind('/');
  if (slash == std::string::npos)
    throw StoreError("bad predicate spec '" + s + "'");
  return {s.substr(0, slash), std::stoul(s.substr(slash + 1))};
}

inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw StoreError("cannot write " + tmp.string());
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

} // namespace detail

inline std::string dump_filename(const std::string& module, DomainId domain) {
  return module + "." + domain_name(domain) + ".dump";
}

inline std::string render_dump(const AnalysisResult& r,
                               const std::string& source_hash) {
  Dom dom(r.domain, r.types.get());
  std::ostringstream os;
  os << "semsearch-dump 1 sha256\n";
  os << "module " << r.module << "\n";
  os << "hash " << source_hash << "\n";
  os << "domain " << domain_name(r.domain) << "\n";
  os << "created 0\n";
  for (const auto& [name, body] : r.typedefs)
    os << "typedef " << name << " " << body << "\n";
  for (const auto& [pred, elem] : r.entries)
    os << "entry " << pred.name << "/" << pred.arity << " " << dom.text(elem)
       << "\n";
  for (const Triple& t : r.triples)
    os << "triple " << t.pred.name << "/" << t.pred.arity << " " << t.variant
       << " call " << dom.text(t.call) << " succ " << dom.text(t.succ) << "\n";
  return os.str();
}

struct LoadedDump {
  AnalysisResult result;
  std::string source_hash;
};

inline LoadedDump parse_dump(const std::string& content) {
  std::istringstream is(content);
  std::string line;
  LoadedDump out;
  AnalysisResult& r = out.result;
  r.types = std::make_shared<TypeTable>();
  // the builtin list type always exists, exactly as the analyzer set it up
  shapes::TypeBinder boot(*r.types);
  std::optional<Dom> dom;

  if (!std::getline(is, line) || line != "semsearch-dump 1 sha256")
    throw StoreError("bad dump: unrecognized header");

  // pass 1: headers and typedef names, so recursive bodies can refer ahead
  std::vector<std::string> body_lines;
  std::vector<std::pair<std::string, std::string>> typedefs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto sp = line.find(' ');
    std::string key = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "module") {
      r.module = rest;
    } else if (key == "hash") {
      out.source_hash = rest;
    } else if (key == "domain") {
      if (!domain_from_name(rest, r.domain))
        throw StoreError("bad dump: unknown domain '" + rest + "'");
    } else if (key == "created") {
      // informational only
    } else if (key == "typedef") {
      auto sp2 = rest.find(' ');
      if (sp2 == std::string::npos) throw StoreError("bad typedef line");
      std::string name = rest.substr(0, sp2);
      r.types->alloc_named(name);
      typedefs.emplace_back(name, rest.substr(sp2 + 1));
    } else if (key == "entry" || key == "triple") {
      body_lines.push_back(line);
    } else {
      throw StoreError("bad dump: unknown line '" + key + "'");
    }
  }
  if (r.module.empty()) throw StoreError("bad dump: missing module line");

  // pass 2: typedef bodies
  for (const auto& [name, body] : typedefs) {
    int slot = *r.types->named(name);
    r.types->define(slot, parse_type_text(*r.types, body));
    r.typedefs.emplace_back(name, body);
  }

  dom.emplace(r.domain, r.types.get());

  for (const std::string& bl : body_lines) {
    auto w = detail::split_ws(bl);
    if (w[0] == "entry") {
      if (w.size() != 3) throw StoreError("bad entry line '" + bl + "'");
      auto [name, arity] = detail::split_spec(w[1]);
      r.entries.emplace_back(PredId{r.module, name, arity},
                             dom->parse_elem(canon_vars(arity), w[2]));
    } else {
      if (w.size() != 7 || w[3] != "call" || w[5] != "succ")
        throw StoreError("bad triple line '" + bl + "'");
      auto [name, arity] = detail::split_spec(w[1]);
      Triple t;
      t.pred = PredId{r.module, name, arity};
      t.variant = std::stoi(w[2]);
      t.call = dom->parse_elem(canon_vars(arity), w[4]);
      t.succ = dom->parse_elem(canon_vars(arity), w[6]);
      r.triples.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::string render_index(const std::vector<IndexEntry>& entries) {
  std::vector<IndexEntry> sorted = entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const IndexEntry& a, const IndexEntry& b) {
              return a.module < b.module;
            });
  std::ostringstream os;
  os << "semsearch-index 1\n";
  for (const auto& e : sorted) {
    os << "module " << e.module << " path " << e.path << " hash " << e.hash
       << " domains ";
    for (std::size_t i = 0; i < e.domains.size(); ++i)
      os << (i ? "," : "") << e.domains[i];
    os << " exports ";
    for (std::size_t i = 0; i < e.exports.size(); ++i)
      os << (i ? "," : "") << e.exports[i];
    os << " keywords ";
    for (std::size_t i = 0; i < e.keywords.size(); ++i)
      os << (i ? "," : "") << e.keywords[i];
    os << "\n";
  }
  return os.str();
}

inline std::vector<IndexEntry> parse_index(const std::string& content) {
  std::istringstream is(content);
  std::string line;
  if (!std::getline(is, line) || line != "semsearch-index 1")
    throw StoreError("bad index: unrecognized header");
  std::vector<IndexEntry> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto w = detail::split_ws(line);
    // module <m> path <p> hash <h> domains <csv> exports <csv> keywords <csv>
    IndexEntry e;
    for (std::size_t i = 0; i + 1 < w.size(); i += 2) {
      const std::string& k = w[i];
      const std::string& v = w[i + 1];
      if (k == "module") e.module = v;
      else if (k == "path") e.path = v;
      else if (k == "hash") e.hash = v;
      else if (k == "domains") e.domains = detail::split_on(v, ',');
      else if (k == "exports") e.exports = detail::split_on(v, ',');
      else if (k == "keywords") e.keywords = detail::split_on(v, ',');
    }
    if (e.module.empty()) throw StoreError("bad index line '" + line + "'");
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------

// Cache directory of dumps plus an index, with an in-memory read cache.
class CorpusStore {
public:
  explicit CorpusStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  bool exists() const { return std::filesystem::exists(dir_ / "index.txt"); }

  void save(const AnalysisResult& r, const std::string& source_hash) {
    std::filesystem::create_directories(dir_);
    detail::atomic_write(dir_ / dump_filename(r.module, r.domain),
                         render_dump(r, source_hash));
    cache_.erase({r.module, r.domain});
  }

  void write_index(const std::vector<IndexEntry>& entries) {
    std::filesystem::create_directories(dir_);
    detail::atomic_write(dir_ / "index.txt", render_index(entries));
  }

  std::vector<IndexEntry> read_index() const {
    std::ifstream isf(dir_ / "index.txt", std::ios::binary);
    if (!isf) throw StoreError("no index at " + (dir_ / "index.txt").string());
    std::ostringstream buf;
    buf << isf.rdbuf();
    return parse_index(buf.str());
  }

  bool has_dump(const std::string& module, DomainId domain) const {
    return std::filesystem::exists(dir_ / dump_filename(module, domain));
  }

  // nullptr when the dump does not exist
  const LoadedDump* load(const std::string& module, DomainId domain) {
    auto key = std::make_pair(module, domain);
    auto it = cache_.find(key);
    if (it != cache_.end()) return &it->second;
    std::filesystem::path p = dir_ / dump_filename(module, domain);
    std::ifstream isf(p, std::ios::binary);
    if (!isf) return nullptr;
    std::ostringstream buf;
    buf << isf.rdbuf();
    auto [pos, ok] = cache_.emplace(key, parse_dump(buf.str()));
    (void)ok;
    return &pos->second;
  }

  // a dump is stale when the module source bytes changed
  bool fresh(const std::string& module, DomainId domain,
             const std::string& source_hash) {
    const LoadedDump* d = load(module, domain);
    return d && d->source_hash == source_hash;
  }

private:
  std::filesystem::path dir_;
  std::map<std::pair<std::string, DomainId>, LoadedDump> cache_;
};

} // namespace semsearch
