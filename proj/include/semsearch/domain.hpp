#pragma once

// Uniform dispatch over the two analysis domains.  A Dom carries the domain
// tag plus the type table shapes elements index into; shfr never touches
// the table.

#include "abstract.hpp"
#include "shapes.hpp"
#include "shfr.hpp"

#include <stdexcept>

namespace semsearch {

struct Dom {
  DomainId id = DomainId::Shfr;
  TypeTable* types = nullptr; // required for shapes

  Dom() = default;
  Dom(DomainId d, TypeTable* tt) : id(d), types(tt) {
    if (d == DomainId::Shapes && !tt)
      throw std::logic_error("shapes domain needs a type table");
  }

  TypeTable& tt() const { return *types; }

  AbstractSubst top(const std::vector<std::string>& vars) const {
    return id == DomainId::Shfr ? shfr::top(vars) : shapes::top(tt(), vars);
  }
  AbstractSubst bottom(const std::vector<std::string>& vars) const {
    return bottom_elem(id, vars);
  }
  bool is_top(const AbstractSubst& a) const {
    if (a.bot) return false;
    if (id == DomainId::Shfr) return shfr::equal(a, shfr::top(a.vars));
    return shapes::is_top(tt(), a);
  }
  bool leq(const AbstractSubst& a, const AbstractSubst& b) const {
    return id == DomainId::Shfr ? shfr::leq(a, b) : shapes::leq(tt(), a, b);
  }
  bool equal(const AbstractSubst& a, const AbstractSubst& b) const {
    return id == DomainId::Shfr ? shfr::equal(a, b) : shapes::equal(tt(), a, b);
  }
  AbstractSubst lub(const AbstractSubst& a, const AbstractSubst& b) const {
    return id == DomainId::Shfr ? shfr::lub(a, b) : shapes::lub(tt(), a, b);
  }
  AbstractSubst lub_exact(const AbstractSubst& a, const AbstractSubst& b,
                          bool& exact) const {
    return id == DomainId::Shfr ? shfr::lub_exact(a, b, exact)
                                : shapes::lub_exact(tt(), a, b, exact);
  }
  AbstractSubst glb(const AbstractSubst& a, const AbstractSubst& b) const {
    return id == DomainId::Shfr ? shfr::glb(a, b) : shapes::glb(tt(), a, b);
  }
  AbstractSubst widen(const AbstractSubst& prev, const AbstractSubst& next) const {
    return id == DomainId::Shfr ? shfr::widen(prev, next)
                                : shapes::widen(tt(), prev, next);
  }
  AbstractSubst amgu(const AbstractSubst& a, const TermPtr& lhs,
                     const TermPtr& rhs) const {
    return id == DomainId::Shfr ? shfr::amgu(a, lhs, rhs)
                                : shapes::amgu(tt(), a, lhs, rhs);
  }
  AbstractSubst extend(const AbstractSubst& a,
                       const std::vector<std::string>& fresh) const {
    return id == DomainId::Shfr ? shfr::extend(a, fresh)
                                : shapes::extend(tt(), a, fresh);
  }
  AbstractSubst project(const AbstractSubst& a,
                        const std::vector<std::string>& keep) const {
    return id == DomainId::Shfr ? shfr::project(a, keep) : shapes::project(a, keep);
  }
  AbstractSubst rename(const AbstractSubst& a,
                       const std::map<std::string, std::string>& m) const {
    return id == DomainId::Shfr ? shfr::rename(a, m) : shapes::rename(a, m);
  }
  AbstractSubst apply_call_success(const AbstractSubst& call,
                                   const std::vector<TermPtr>& actuals,
                                   const AbstractSubst& succ) const {
    return id == DomainId::Shfr
               ? shfr::apply_call_success(call, actuals, succ)
               : shapes::apply_call_success(tt(), call, actuals, succ);
  }
  std::string text(const AbstractSubst& a) const {
    return id == DomainId::Shfr ? shfr::text(a) : shapes::text(tt(), a);
  }
  AbstractSubst parse_elem(const std::vector<std::string>& vars,
                           const std::string& text) const {
    return id == DomainId::Shfr ? shfr::parse(vars, text)
                                : shapes::parse(tt(), vars, text);
  }
};

} // namespace semsearch
