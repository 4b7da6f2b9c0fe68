#pragma once

// The three ways of referring to type fragments (focus markers, selectors,
// predicates) and the conversions between them.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dtr/selector.hpp"
#include "dtr/syntax.hpp"

namespace dtr {

/// The addressed subterm, focus markers removed.
/// Throws UnknownName, KindMismatch, BadIndex or BadPath.
TypeExpr resolve(const Module& m, const TypeSel& sel);

/// Replaces the addressed subterm by `f(subterm)`.
Module replaceAt(const Module& m, const TypeSel& sel,
                 const std::function<TypeExpr(const TypeExpr&)>& f);

/// Validates a component range: UnknownName, KindMismatch or BadRange.
const ConsDecl& resolveRange(const Module& m, const CompRangeSel& r);

/// Throws NoFocus or MultipleFoci.
FocusTarget focusToSelector(const Module& m);
/// Throws AlreadyFocused, or whatever resolving the target throws.
Module selectorToFocus(const Module& m, const FocusTarget& target);

/// Every type selector of the module: declaration order, then pre-order
/// (node before children, children left to right).
std::vector<TypeSel> allSelectors(const Module& m);

struct TypePredicate {
  enum class Kind { EqualsType, MentionsName, TopLevelIs };
  enum class Shape { Fun, Tuple, List, App, Var };

  Kind kind = Kind::EqualsType;
  TypeExpr type;  // EqualsType
  Name name;      // MentionsName
  Shape shape = Shape::App;

  static TypePredicate equals(TypeExpr t);
  static TypePredicate mentions(Name n);
  static TypePredicate topLevelIs(Shape s);

  bool operator()(const TypeExpr& t) const;
};

/// `equals:<type>`, `mentions:<TypeName>`, `top:Fun|Tuple|List|App|Var`.
TypePredicate parsePredicate(std::string_view s);
std::string toString(const TypePredicate& p);

std::vector<TypeSel> selectorsMatching(const Module& m, const TypePredicate& p);

/// Constructor-component runs whose types equal `run` element-wise, in
/// declaration order.
std::vector<CompRangeSel> rangeOccurrences(const Module& m,
                                           const std::vector<TypeExpr>& run);

}  // namespace dtr
