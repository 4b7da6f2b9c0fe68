#pragma once

// Generic traversals over MiniFun syntax. A rewrite is supplied for the one
// sort it cares about; the traversal carries it through every other node.

#include <utility>

#include "dtr/syntax.hpp"

namespace dtr {

/// Bottom-up, type-preserving rewrite of every node of a type expression.
template <class F>
TypeExpr everywhere(TypeExpr t, F&& f) {
  for (auto& a : t.args) a = everywhere(std::move(a), f);
  return f(std::move(t));
}

template <class F>
Pattern everywhere(Pattern p, F&& f) {
  for (auto& a : p.args) a = everywhere(std::move(a), f);
  return f(std::move(p));
}

/// Rewrites every type expression in every declaration, including
/// signatures and constructor components.
template <class F>
Module mapTypes(Module m, F&& f) {
  for (auto& d : m.decls) {
    if (d.kind == Decl::Kind::Alias || d.kind == Decl::Kind::Sig)
      d.type = everywhere(std::move(d.type), f);
    for (auto& c : d.conss)
      for (auto& t : c.components) t = everywhere(std::move(t), f);
  }
  return m;
}

/// Visits type expressions without rewriting them.
template <class F>
void forEachType(const TypeExpr& t, F&& f) {
  f(t);
  for (const auto& a : t.args) forEachType(a, f);
}

/// Bottom-up rewrite of every pattern inside an expression (case
/// alternatives).
template <class F>
Expr mapPatternsIn(Expr e, F&& f) {
  for (auto& k : e.kids) k = mapPatternsIn(std::move(k), f);
  for (auto& alt : e.alts) {
    alt.pat = everywhere(std::move(alt.pat), f);
    alt.rhs = mapPatternsIn(std::move(alt.rhs), f);
  }
  return e;
}

/// Bottom-up rewrite of every pattern in every equation.
template <class F>
Module mapPatterns(Module m, F&& f) {
  for (auto& d : m.decls)
    for (auto& eq : d.equations) {
      for (auto& p : eq.patterns) p = everywhere(std::move(p), f);
      eq.rhs = mapPatternsIn(std::move(eq.rhs), f);
    }
  return m;
}

/// Bottom-up rewrite of every expression node.
template <class F>
Expr everywhere(Expr e, F&& f) {
  for (auto& k : e.kids) k = everywhere(std::move(k), f);
  for (auto& alt : e.alts) alt.rhs = everywhere(std::move(alt.rhs), f);
  return f(std::move(e));
}

/// Applies `f(Equation&)` to every equation of every function.
template <class F>
Module mapEquations(Module m, F&& f) {
  for (auto& d : m.decls)
    for (auto& eq : d.equations) f(eq);
  return m;
}

}  // namespace dtr
