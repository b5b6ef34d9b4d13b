#pragma once

// Regular type expressions over program terms: leaves (term, bot, int, num,
// atm), homogeneous lists, constructor patterns, unions, and named types that
// may refer to themselves. The table interns immutable structure, supports
// redefinable named slots for fixpoint computation, and offers inclusion
// (simulation-based, sound), meet with recursive synthesis, membership of
// concrete terms, and a canonical parseable text form.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semsearch/term.hpp"

namespace semsearch {

struct TypeExpr {
  enum class K { Top, Bot, Int, Num, Atm, List, Cons, Union, Ref };
  K k = K::Top;
  std::string functor;   // Cons only; integer constants use their digit text
  std::vector<int> kids; // Cons args, Union alternatives, List/Ref single target
};

class TypeTable {
public:
  TypeTable() {
    intern_leaf(TypeExpr::K::Top);
    intern_leaf(TypeExpr::K::Bot);
    intern_leaf(TypeExpr::K::Int);
    intern_leaf(TypeExpr::K::Num);
    intern_leaf(TypeExpr::K::Atm);
  }

  int top() const { return 0; }
  int bot() const { return 1; }
  int t_int() const { return 2; }
  int t_num() const { return 3; }
  int t_atm() const { return 4; }

  const TypeExpr& at(int id) const { return exprs_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return exprs_.size(); }

  int list_of(int elem) {
    TypeExpr e;
    e.k = TypeExpr::K::List;
    e.kids = {elem};
    return intern(std::move(e));
  }

  int cons(const std::string& functor, std::vector<int> args) {
    TypeExpr e;
    e.k = TypeExpr::K::Cons;
    e.functor = functor;
    e.kids = std::move(args);
    return intern(std::move(e));
  }

  int int_const(const std::string& digits) { return cons(digits, {}); }
  int atom_const(const std::string& name) { return cons(name, {}); }

  // Union with flattening of anonymous unions, bottom removal, id-level
  // deduplication and canonical ordering. Collapses to Top/Bot/single child.
  int union_of(const std::vector<int>& alts) {
    std::vector<int> flat;
    std::set<int> seen;
    std::set<int> visiting; // anonymous unions reached through reference slots
    bool has_top = false;
    auto push = [&](int id, auto&& self) -> void {
      int r = resolve(id);
      const TypeExpr& e = at(r);
      if (e.k == TypeExpr::K::Bot) return;
      if (e.k == TypeExpr::K::Top) {
        has_top = true;
        return;
      }
      if (e.k == TypeExpr::K::Union && !name_of(r)) {
        if (!visiting.insert(r).second) return;
        for (int kid : e.kids) self(kid, self);
        return;
      }
      // Keep named types as references so recursion stays finite.
      int keep = name_of(id) ? id : r;
      if (seen.insert(keep).second) flat.push_back(keep);
    };
    for (int a : alts) push(a, push);
    if (has_top) return top();
    if (flat.empty()) return bot();
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end(),
              [this](int a, int b) { return sort_key(a) < sort_key(b); });
    TypeExpr e;
    e.k = TypeExpr::K::Union;
    e.kids = std::move(flat);
    return intern(std::move(e));
  }

  // ---- named and redefinable slots ----

  int alloc_named(const std::string& name) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return it->second;
    TypeExpr e;
    e.k = TypeExpr::K::Ref;
    e.kids = {bot()};
    int id = add(std::move(e));
    by_name_[name] = id;
    name_of_[id] = name;
    return id;
  }

  int alloc_anon() {
    TypeExpr e;
    e.k = TypeExpr::K::Ref;
    e.kids = {bot()};
    return add(std::move(e));
  }

  void define(int slot, int target) {
    TypeExpr& e = exprs_[static_cast<std::size_t>(slot)];
    if (e.k != TypeExpr::K::Ref)
      throw std::logic_error("define on a non-slot type");
    if (e.kids[0] == target) return;
    e.kids[0] = target;
    ++version_;
    leq_memo_.clear();
    glb_memo_.clear();
  }

  std::optional<int> named(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::string> name_of(int id) const {
    auto it = name_of_.find(id);
    if (it == name_of_.end()) return std::nullopt;
    return it->second;
  }

  // Names an existing anonymous slot so text() can refer to it compactly.
  void assign_name(int id, const std::string& name) {
    if (by_name_.count(name))
      throw std::logic_error("type name already taken: " + name);
    if (name_of_.count(id))
      throw std::logic_error("slot already named");
    by_name_[name] = id;
    name_of_[id] = name;
  }

  // Declared types are the ones success shapes may be collapsed to during
  // widening: module regtypes, query regtypes and the list builtin.  Order
  // of declaration is the preference order when several fit.
  void mark_declared(const std::string& name) {
    if (declared_set_.insert(name).second) declared_.push_back(name);
  }
  bool is_declared(const std::string& name) const {
    return declared_set_.count(name) != 0;
  }
  const std::vector<std::string>& declared() const { return declared_; }

  // Follow Ref chains; a pure reference cycle denotes the empty type.
  int resolve(int id) const {
    std::set<int> seen;
    while (at(id).k == TypeExpr::K::Ref) {
      if (!seen.insert(id).second) return bot();
      id = at(id).kids[0];
    }
    return id;
  }

  // ---- inclusion ----

  bool leq(int a, int b) {
    auto key = std::make_pair(a, b);
    auto it = leq_memo_.find(key);
    if (it != leq_memo_.end()) return it->second;
    std::set<std::pair<int, int>> assume;
    bool r = sub(a, b, assume);
    leq_memo_[key] = r;
    return r;
  }

  bool equal(int a, int b) { return leq(a, b) && leq(b, a); }

  // ---- meet ----

  int glb(int a, int b) {
    if (a == b) return a;
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto done = glb_memo_.find(key);
    if (done != glb_memo_.end()) return done->second;
    auto in = glb_inprogress_.find(key);
    if (in != glb_inprogress_.end()) {
      in->second.second = true; // the pending slot is genuinely recursive
      return in->second.first;
    }
    int slot = alloc_anon();
    glb_inprogress_[key] = {slot, false};
    int body = meet(a, b);
    bool used = glb_inprogress_[key].second;
    glb_inprogress_.erase(key);
    int result;
    if (used) {
      define(slot, body);
      result = slot;
    } else {
      result = body; // slot stays an unreachable placeholder
    }
    glb_memo_[key] = result;
    return result;
  }

  // ---- membership of concrete terms ----

  bool member(const TermPtr& t, int id) const {
    std::set<std::pair<const Term*, int>> guard;
    return member_walk(t, id, guard);
  }

  // ---- canonical text ----
  //
  //   term | bot | int | num | atm        leaves
  //   name                                reference to a named type
  //   list(T)                             homogeneous list
  //   [T1|T2]  []                         list cell pattern, empty list
  //   f(T,...)  'f'(T,...)                constructor pattern
  //   'a'  123                            atom / integer constant
  //   (A1|A2|...)                         union
  //
  // 'display' overrides names (used to present synthesized types); constants
  // are always quoted so references and constants cannot collide.
  std::string text(int id, const std::map<int, std::string>* display = nullptr) const {
    return text_walk(id, display, true);
  }

  // Like text() but a named slot prints as its name instead of expanding.
  std::string display_text(int id) const { return text_walk(id, nullptr, false); }

  unsigned version() const { return version_; }

private:
  int add(TypeExpr e) {
    exprs_.push_back(std::move(e));
    return static_cast<int>(exprs_.size()) - 1;
  }

  void intern_leaf(TypeExpr::K k) {
    TypeExpr e;
    e.k = k;
    intern_.emplace(intern_key(e), static_cast<int>(exprs_.size()));
    exprs_.push_back(std::move(e));
  }

  static std::string intern_key(const TypeExpr& e) {
    std::string s;
    s.push_back(static_cast<char>('a' + static_cast<int>(e.k)));
    s += e.functor;
    for (int kid : e.kids) {
      s.push_back(',');
      s += std::to_string(kid);
    }
    return s;
  }

  int intern(TypeExpr e) {
    std::string key = intern_key(e);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    int id = add(std::move(e));
    intern_[key] = id;
    return id;
  }

  // Structural ordering key, independent of id numbering.
  std::string sort_key(int id) const {
    std::set<int> seen;
    return sort_key_walk(id, seen);
  }

  std::string sort_key_walk(int id, std::set<int>& seen) const {
    if (auto n = name_of(id)) return "R(" + *n + ")";
    int r = resolve(id);
    if (auto n = name_of(r)) return "R(" + *n + ")";
    if (!seen.insert(r).second) return "X";
    const TypeExpr& e = at(r);
    std::string s;
    switch (e.k) {
    case TypeExpr::K::Top: s = "T"; break;
    case TypeExpr::K::Bot: s = "B"; break;
    case TypeExpr::K::Int: s = "I"; break;
    case TypeExpr::K::Num: s = "N"; break;
    case TypeExpr::K::Atm: s = "A"; break;
    case TypeExpr::K::List: s = "L(" + sort_key_walk(e.kids[0], seen) + ")"; break;
    case TypeExpr::K::Cons: {
      s = "C(" + e.functor + "/" + std::to_string(e.kids.size());
      for (int kid : e.kids) s += "," + sort_key_walk(kid, seen);
      s += ")";
      break;
    }
    case TypeExpr::K::Union: {
      s = "U(";
      for (std::size_t i = 0; i < e.kids.size(); ++i)
        s += (i ? "," : "") + sort_key_walk(e.kids[i], seen);
      s += ")";
      break;
    }
    case TypeExpr::K::Ref: s = "X"; break;
    }
    seen.erase(r);
    return s;
  }

  // ---- inclusion internals ----

  static bool is_int_text(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  }

  bool sub(int a, int b, std::set<std::pair<int, int>>& assume) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return true;
    const TypeExpr& ea = at(a);
    const TypeExpr& eb = at(b);
    if (ea.k == TypeExpr::K::Bot) return true;
    if (eb.k == TypeExpr::K::Top) return true;
    if (ea.k == TypeExpr::K::Top) return false;
    if (eb.k == TypeExpr::K::Bot) return false;
    auto key = std::make_pair(a, b);
    if (assume.count(key)) return true;
    assume.insert(key);
    bool r = sub_cases(ea, eb, a, b, assume);
    assume.erase(key);
    return r;
  }

  bool sub_cases(const TypeExpr& ea, const TypeExpr& eb, int a, int b,
                 std::set<std::pair<int, int>>& assume) {
    // A union on the left must be covered alternative by alternative.
    if (ea.k == TypeExpr::K::Union) {
      for (int kid : ea.kids)
        if (!sub(kid, b, assume)) return false;
      return true;
    }
    switch (eb.k) {
    case TypeExpr::K::Int:
      if (ea.k == TypeExpr::K::Int) return true;
      return ea.k == TypeExpr::K::Cons && ea.kids.empty() && is_int_text(ea.functor);
    case TypeExpr::K::Num:
      if (ea.k == TypeExpr::K::Int || ea.k == TypeExpr::K::Num) return true;
      return ea.k == TypeExpr::K::Cons && ea.kids.empty() && is_int_text(ea.functor);
    case TypeExpr::K::Atm:
      if (ea.k == TypeExpr::K::Atm) return true;
      return ea.k == TypeExpr::K::Cons && ea.kids.empty() && !is_int_text(ea.functor);
    case TypeExpr::K::List: {
      int elem = eb.kids[0];
      if (ea.k == TypeExpr::K::List) return sub(ea.kids[0], elem, assume);
      if (ea.k == TypeExpr::K::Cons) {
        if (ea.kids.empty()) return ea.functor == "[]";
        if (ea.functor == "." && ea.kids.size() == 2)
          return sub(ea.kids[0], elem, assume) && sub(ea.kids[1], b, assume);
        return false;
      }
      return false;
    }
    case TypeExpr::K::Cons: {
      if (ea.k == TypeExpr::K::List)
        return sub_list_in(a, b, assume); // via the two-alternative unfolding
      if (ea.k != TypeExpr::K::Cons) return false;
      if (ea.functor != eb.functor || ea.kids.size() != eb.kids.size()) return false;
      for (std::size_t i = 0; i < ea.kids.size(); ++i)
        if (!sub(ea.kids[i], eb.kids[i], assume)) return false;
      return true;
    }
    case TypeExpr::K::Union: {
      if (ea.k == TypeExpr::K::List) return sub_list_in(a, b, assume);
      // Constructions and leaves: any alternative may cover the left side.
      for (int kid : eb.kids)
        if (sub(a, kid, assume)) return true;
      return false;
    }
    default:
      return false;
    }
  }

  // list(E) on the left of a non-list right side: check both unfoldings
  // [] and [E|list(E)].
  bool sub_list_in(int a, int b, std::set<std::pair<int, int>>& assume) {
    int elem = at(resolve(a)).kids[0];
    int nil_t = atom_const("[]");
    int cell = cons(".", {elem, a});
    return sub(nil_t, b, assume) && sub(cell, b, assume);
  }

  // ---- meet internals ----

  int meet(int a, int b) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return a;
    const TypeExpr& ea = at(a);
    const TypeExpr& eb = at(b);
    if (ea.k == TypeExpr::K::Top) return b;
    if (eb.k == TypeExpr::K::Top) return a;
    if (ea.k == TypeExpr::K::Bot || eb.k == TypeExpr::K::Bot) return bot();
    if (ea.k == TypeExpr::K::Union) {
      std::vector<int> alts;
      for (int kid : ea.kids) alts.push_back(glb(kid, b));
      return union_of(alts);
    }
    if (eb.k == TypeExpr::K::Union) {
      std::vector<int> alts;
      for (int kid : eb.kids) alts.push_back(glb(a, kid));
      return union_of(alts);
    }
    if (ea.k == TypeExpr::K::Int) {
      if (eb.k == TypeExpr::K::Num) return a; // ints are nums
      return meet_with_int(eb) ? (eb.k == TypeExpr::K::Cons ? b : a) : bot();
    }
    if (eb.k == TypeExpr::K::Int) {
      if (ea.k == TypeExpr::K::Num) return b;
      return meet_with_int(ea) ? (ea.k == TypeExpr::K::Cons ? a : b) : bot();
    }
    if (ea.k == TypeExpr::K::Num) {
      if (eb.k == TypeExpr::K::Num) return a;
      return meet_with_int(eb) ? b : bot();
    }
    if (eb.k == TypeExpr::K::Num) return meet_with_int(ea) ? a : bot();
    if (ea.k == TypeExpr::K::Atm)
      return (eb.k == TypeExpr::K::Atm ||
              (eb.k == TypeExpr::K::Cons && eb.kids.empty() && !is_int_text(eb.functor)))
                 ? b
                 : bot();
    if (eb.k == TypeExpr::K::Atm)
      return (ea.k == TypeExpr::K::Cons && ea.kids.empty() && !is_int_text(ea.functor))
                 ? a
                 : bot();
    if (ea.k == TypeExpr::K::List && eb.k == TypeExpr::K::List) {
      int e = glb(ea.kids[0], eb.kids[0]);
      return at(resolve(e)).k == TypeExpr::K::Bot ? atom_const("[]") : list_of(e);
    }
    if (ea.k == TypeExpr::K::List || eb.k == TypeExpr::K::List) {
      int lst = ea.k == TypeExpr::K::List ? a : b;
      const TypeExpr& other = ea.k == TypeExpr::K::List ? eb : ea;
      int other_id = ea.k == TypeExpr::K::List ? b : a;
      if (other.k != TypeExpr::K::Cons) return bot();
      if (other.kids.empty()) return other.functor == "[]" ? other_id : bot();
      if (other.functor != "." || other.kids.size() != 2) return bot();
      int elem = at(resolve(lst)).kids[0];
      int h = glb(other.kids[0], elem);
      int t = glb(other.kids[1], lst);
      if (at(resolve(h)).k == TypeExpr::K::Bot || at(resolve(t)).k == TypeExpr::K::Bot)
        return bot();
      return cons(".", {h, t});
    }
    // two constructions
    if (ea.functor != eb.functor || ea.kids.size() != eb.kids.size()) return bot();
    std::vector<int> kids;
    for (std::size_t i = 0; i < ea.kids.size(); ++i) {
      int m = glb(ea.kids[i], eb.kids[i]);
      if (at(resolve(m)).k == TypeExpr::K::Bot) return bot();
      kids.push_back(m);
    }
    return cons(ea.functor, std::move(kids));
  }

  // Does expr intersect int: the Int leaf, or an integer constant.
  static bool meet_with_int(const TypeExpr& e) {
    if (e.k == TypeExpr::K::Int) return true;
    return e.k == TypeExpr::K::Cons && e.kids.empty() && is_int_text(e.functor);
  }

  // ---- membership internals ----

  bool member_walk(const TermPtr& t, int id,
                   std::set<std::pair<const Term*, int>>& guard) const {
    id = resolve(id);
    const TypeExpr& e = at(id);
    switch (e.k) {
    case TypeExpr::K::Top:
      return true;
    case TypeExpr::K::Bot:
      return false;
    case TypeExpr::K::Int:
    case TypeExpr::K::Num:
      return t->is_int();
    case TypeExpr::K::Atm:
      return t->is_atom();
    case TypeExpr::K::List: {
      if (t->is_var()) return false;
      if (t->name == "[]" && t->args.empty()) return true;
      if (t->name == "." && t->args.size() == 2)
        return member_walk(t->args[0], e.kids[0], guard) &&
               member_walk(t->args[1], id, guard);
      return false;
    }
    case TypeExpr::K::Cons: {
      if (t->is_var()) return false;
      if (t->name != e.functor || t->args.size() != e.kids.size()) return false;
      for (std::size_t i = 0; i < t->args.size(); ++i)
        if (!member_walk(t->args[i], e.kids[i], guard)) return false;
      return true;
    }
    case TypeExpr::K::Union: {
      auto key = std::make_pair(t.get(), id);
      if (!guard.insert(key).second) return false;
      bool r = false;
      for (int kid : e.kids)
        if (member_walk(t, kid, guard)) {
          r = true;
          break;
        }
      guard.erase(key);
      return r;
    }
    case TypeExpr::K::Ref:
      return false; // resolve() already chased refs; a leftover cycle is empty
    }
    return false;
  }

  // ---- text internals ----

  std::string text_walk(int id, const std::map<int, std::string>* display,
                        bool expand_named) const {
    if (!expand_named) {
      if (display) {
        auto it = display->find(id);
        if (it != display->end()) return it->second;
      }
      if (auto n = name_of(id)) return *n;
    }
    // Follow reference chains one hop at a time so an intermediate named
    // slot is presented by its name rather than skipped over.
    std::set<int> chain;
    while (at(id).k == TypeExpr::K::Ref) {
      if (!chain.insert(id).second) return "bot"; // pure reference cycle
      id = at(id).kids[0];
      if (display) {
        auto it = display->find(id);
        if (it != display->end()) return it->second;
      }
      if (auto n = name_of(id)) return *n;
    }
    const TypeExpr& e = at(id);
    switch (e.k) {
    case TypeExpr::K::Top: return "term";
    case TypeExpr::K::Bot: return "bot";
    case TypeExpr::K::Int: return "int";
    case TypeExpr::K::Num: return "num";
    case TypeExpr::K::Atm: return "atm";
    case TypeExpr::K::List: return "list(" + text_walk(e.kids[0], display, false) + ")";
    case TypeExpr::K::Cons: {
      if (e.kids.empty()) {
        if (e.functor == "[]") return "[]";
        return is_int_text(e.functor) ? e.functor : "'" + e.functor + "'";
      }
      if (e.functor == "." && e.kids.size() == 2)
        return "[" + text_walk(e.kids[0], display, false) + "|" +
               text_walk(e.kids[1], display, false) + "]";
      std::string s = atom_needs_quotes(e.functor) ? "'" + e.functor + "'" : e.functor;
      s += "(";
      for (std::size_t i = 0; i < e.kids.size(); ++i)
        s += (i ? "," : "") + text_walk(e.kids[i], display, false);
      s += ")";
      return s;
    }
    case TypeExpr::K::Union: {
      std::string s = "(";
      for (std::size_t i = 0; i < e.kids.size(); ++i)
        s += (i ? "|" : "") + text_walk(e.kids[i], display, false);
      s += ")";
      return s;
    }
    case TypeExpr::K::Ref:
      return "bot"; // unreachable: resolve() fixed refs above
    }
    return "term";
  }

  std::vector<TypeExpr> exprs_;
  std::map<std::string, int> intern_;
  std::map<std::string, int> by_name_;
  std::vector<std::string> declared_;
  std::set<std::string> declared_set_;
  std::map<int, std::string> name_of_;
  std::map<std::pair<int, int>, bool> leq_memo_;
  std::map<std::pair<int, int>, int> glb_memo_;
  std::map<std::pair<int, int>, std::pair<int, bool>> glb_inprogress_;
  unsigned version_ = 0;
};

// ---------------------------------------------------------------------------
// Parser for the canonical text form. Named references are resolved through
// the supplied table ('alloc_named' creates forward references on demand).

class TypeTextParser {
public:
  TypeTextParser(TypeTable& table, const std::string& text)
      : table_(table), text_(text) {}

  int parse() {
    int id = parse_type();
    skip_ws();
    if (pos_ != text_.size())
      throw std::runtime_error("trailing input in type text: " + text_);
    return id;
  }

private:
  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("bad type text '" + text_ + "': " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  std::string ident() {
    skip_ws();
    std::string s;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      s.push_back(text_[pos_++]);
    if (s.empty()) fail("expected an identifier");
    return s;
  }

  std::string quoted() {
    ++pos_; // opening quote already seen
    std::string s;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated quoted name");
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        s.push_back(text_[pos_++]);
      } else if (c == '\'') {
        break;
      } else {
        s.push_back(c);
      }
    }
    return s;
  }

  int parse_type() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      std::vector<int> alts;
      alts.push_back(parse_type());
      while (eat('|')) alts.push_back(parse_type());
      if (!eat(')')) fail("expected ')'");
      return table_.union_of(alts);
    }
    if (c == '[') {
      ++pos_;
      if (eat(']')) return table_.atom_const("[]");
      int h = parse_type();
      if (!eat('|')) fail("expected '|' in list cell");
      int t = parse_type();
      if (!eat(']')) fail("expected ']'");
      return table_.cons(".", {h, t});
    }
    if (c == '\'') {
      skip_ws();
      std::string name = quoted();
      if (peek() == '(') return parse_cons(name);
      return table_.atom_const(name);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      std::string s;
      if (text_[pos_] == '-') s.push_back(text_[pos_++]);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        s.push_back(text_[pos_++]);
      return table_.int_const(s);
    }
    std::string name = ident();
    if (name == "term") return table_.top();
    if (name == "bot") return table_.bot();
    if (name == "int") return table_.t_int();
    if (name == "num") return table_.t_num();
    if (name == "atm") return table_.t_atm();
    if (name == "list" && peek() == '(') {
      ++pos_;
      int e = parse_type();
      if (!eat(')')) fail("expected ')'");
      return table_.list_of(e);
    }
    if (peek() == '(') return parse_cons(name);
    return table_.alloc_named(name);
  }

  int parse_cons(const std::string& functor) {
    ++pos_; // '('
    std::vector<int> args;
    args.push_back(parse_type());
    while (eat(',')) args.push_back(parse_type());
    if (!eat(')')) fail("expected ')'");
    return table_.cons(functor, std::move(args));
  }

  TypeTable& table_;
  const std::string& text_;
  std::size_t pos_ = 0;
};

inline int parse_type_text(TypeTable& table, const std::string& text) {
  TypeTextParser p(table, text);
  return p.parse();
}

} // namespace semsearch
