#pragma once

// Positional addresses of type fragments and to-do markers, with their
// string forms:
//
//   alias:Block/rhs            newtype:State/rhs
//   cons:ConsList.Cons/2       sig:deadEnd/type
//   .../path:1.2               descend into the addressed type expression
//   cons:Prog.Prog/2..3        a run of constructor components
//   type:Prog                  the name of a declared type
//   run/4/1.2                  an `undefined` inside equation 4 of run

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtr/syntax.hpp"

namespace dtr {

/// 1-based child indices. Fun = [from, to]; App and Tuple = argument order;
/// List = [element]. Focus markers are transparent.
using Path = std::vector<std::size_t>;

struct TypeSel {
  enum class Kind { AliasRhs, NewtypeRhs, ConsComp, SigType };

  Kind kind = Kind::AliasRhs;
  /// Type name, or the function name for SigType.
  Name owner;
  Name cons;              // ConsComp only
  std::size_t index = 0;  // ConsComp only, 1-based
  Path path;

  static TypeSel aliasRhs(Name ty, Path p = {});
  static TypeSel newtypeRhs(Name ty, Path p = {});
  static TypeSel consComp(Name ty, Name cons, std::size_t index, Path p = {});
  static TypeSel sigType(Name fun, Path p = {});

  TypeSel child(std::size_t step) const;
  bool operator==(const TypeSel&) const = default;
};

struct CompRangeSel {
  Name type;
  Name cons;
  std::size_t start = 1;
  std::size_t count = 1;

  bool operator==(const CompRangeSel&) const = default;
};

struct TypeNameSel {
  Name type;

  bool operator==(const TypeNameSel&) const = default;
};

/// Anything a focus marker can designate.
using FocusTarget = std::variant<TypeSel, CompRangeSel, TypeNameSel>;

struct TodoMarker {
  Name fun;
  std::size_t equation = 1;  // 1-based
  /// Child indices into the right-hand side. App = [fun, arg]; Lam = [body];
  /// Case = [scrutinee, alt rhs...]; Tuple/List = elements.
  Path path;

  bool operator==(const TodoMarker&) const = default;
};

std::string pathToString(const Path& p);
Path parsePath(std::string_view s);

std::string toString(const TypeSel& s);
std::string toString(const CompRangeSel& s);
std::string toString(const TypeNameSel& s);
std::string toString(const FocusTarget& t);
std::string toString(const TodoMarker& t);

/// Throw BadArguments on malformed text.
TypeSel parseTypeSel(std::string_view s);
CompRangeSel parseCompRangeSel(std::string_view s);
FocusTarget parseFocusTarget(std::string_view s);
TodoMarker parseTodoMarker(std::string_view s);

}  // namespace dtr
