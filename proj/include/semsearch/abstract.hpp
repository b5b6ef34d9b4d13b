#pragma once

// Abstract substitutions: the common element shape for both analysis
// domains.  An element is either bottom (unreachable / failure) or a
// description of the variables in `vars`:
//
//   shfr    sharing groups (sets of variables that may be bound to terms
//           sharing a common variable) plus the set of definitely-free
//           variables.  A variable in no sharing group is ground.
//   shapes  a regular type per variable.
//
// The payloads live side by side in one struct; `dom` says which one is
// meaningful.  Operations are in shfr.hpp / shapes.hpp, dispatched by
// domain.hpp.

#include <map>
#include <set>
#include <string>
#include <vector>

namespace semsearch {

enum class DomainId { Shfr, Shapes };

inline const char* domain_name(DomainId d) {
  return d == DomainId::Shfr ? "shfr" : "shapes";
}

inline bool domain_from_name(const std::string& s, DomainId& out) {
  if (s == "shfr") { out = DomainId::Shfr; return true; }
  if (s == "shapes") { out = DomainId::Shapes; return true; }
  return false;
}

using VarSet = std::set<std::string>;
using SharingSet = std::set<std::set<std::string>>;

struct AbstractSubst {
  DomainId dom = DomainId::Shfr;
  bool bot = false;
  std::vector<std::string> vars; // variables of interest, in display order

  // shfr payload
  SharingSet sharing; // each group is a non-empty subset of vars
  VarSet free;        // definitely unbound variables

  // shapes payload
  std::map<std::string, int> ty; // every var in vars maps to a type id

  bool is_bottom() const { return bot; }

  bool has_var(const std::string& v) const {
    for (const auto& w : vars)
      if (w == v) return true;
    return false;
  }
};

inline AbstractSubst bottom_elem(DomainId d, std::vector<std::string> vars) {
  AbstractSubst a;
  a.dom = d;
  a.bot = true;
  a.vars = std::move(vars);
  return a;
}

} // namespace semsearch
