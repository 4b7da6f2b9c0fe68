#pragma once

// Completion of datatype operators to whole programs: patterns and
// expressions are rewritten, constructors are pumped into lambdas when they
// occur unsaturated, conversion functions are generated for swapped types,
// and `undefined` to-do markers are planted where meaning is missing.
//
// Lifts take the module *after* the datatype operator ran; the boundary
// lifts (alias2newtype, swap) also need the module before it.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dtr/datatype_ops.hpp"
#include "dtr/selector.hpp"
#include "dtr/syntax.hpp"

namespace dtr {

/// Generates x1, x2, ... avoiding every name it has seen.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(std::set<Name> used) : used_(std::move(used)) {}

  Name next(const std::string& base = "x");
  void reserve(const Name& n) { used_.insert(n); }

 private:
  std::set<Name> used_;
  std::map<std::string, unsigned> counters_;
};

using Subst = std::map<Name, Expr>;

std::set<Name> freeVars(const Expr& e);
/// Capture-avoiding substitution. A substituted variable in head position is
/// beta-reduced when its replacement is a lambda.
Expr substitute(const Expr& e, const Subst& s, FreshNames& fresh);
/// `f a1 ... an`, beta-reducing while `f` is a lambda.
Expr applyBeta(const Expr& f, std::vector<Expr> args, FreshNames& fresh);

/// Replaces every occurrence of `cons` applied to fewer than `arity`
/// arguments by `\x1 ... xn -> cons x1 ... xn` (keeping given arguments).
Expr etaPump(const Expr& e, const Name& cons, std::size_t arity);

Module liftRenameCons(const Module& m, const Name& oldName, const Name& newName);
/// `m` already has the permuted constructor declaration.
Module liftPermuteComponents(const Module& m, const Name& cons, const Permutation& p);
Module liftGroup(const Module& m, const CompRangeSel& r);
/// `width` is the size of the tuple that was spliced.
Module liftUngroup(const Module& m, const Name& cons, std::size_t index,
                   std::size_t width);
Module liftAlias2Newtype(const Module& before, const Module& after, const Name& ty,
                         const Name& cons);
Module liftNewtype2Alias(const Module& m, const Name& cons);

std::string toMediatorName(const Name& oldTy);    // new -> old
std::string fromMediatorName(const Name& oldTy);  // old -> new
/// Appends both conversion functions for every unifier, reusing existing
/// ones with the expected signature. Throws NameClash otherwise.
Module generateMediators(const Module& before, const Module& after,
                         const std::vector<DataUnifier>& us);
Module liftSwap(const Module& before, const Module& after,
                const std::vector<DataUnifier>& us);

/// `before` still lacks constructor `cons`; `m` has it.
Module liftInclude(const Module& before, const Module& m, const Name& ty,
                   const Name& cons, unsigned tag);
Module liftExclude(const Module& before, const Module& m, const Name& cons,
                   unsigned tag);
Module liftInsert(const Module& before, const Module& m, const Name& cons,
                  std::size_t i, unsigned tag);
Module liftDelete(const Module& before, const Module& m, const Name& cons,
                  std::size_t i, unsigned tag);

/// Selectors and `fun/equation` coordinates that keep `names` alive.
std::vector<std::string> checkEliminate(const Module& m, const std::vector<Name>& names);

/// Every tagged `undefined`, in declaration and pre-order.
std::vector<TodoMarker> todoMarkers(const Module& m);
std::vector<TodoMarker> todoMarkers(const Module& m, unsigned tag);
/// The tag for the next marker-planting step.
unsigned nextTodoTag(const Module& m);
/// The addressed subexpression. Throws BadPath.
const Expr& resolveTodo(const Module& m, const TodoMarker& t);

}  // namespace dtr
