#pragma once

// Basic datatype transformation operators. Each acts on the type
// declarations of a module only, checks its precondition and throws
// dtr::Error with the documented reason code when it does not hold. The
// matching program adaptations live in program_lift.hpp.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtr/focus.hpp"
#include "dtr/selector.hpp"
#include "dtr/syntax.hpp"

namespace dtr {

/// A type name together with the type variables used to refer to its
/// parameters.
struct TypeHdr {
  Name name;
  std::vector<Name> params;

  bool operator==(const TypeHdr&) const = default;
};

/// Name-level correspondence between two structurally equivalent datatypes.
struct DataUnifier {
  Name oldTy;
  Name newTy;
  std::vector<std::pair<Name, Name>> consPairs;  // (old, new)

  DataUnifier inverse() const;
  bool operator==(const DataUnifier&) const = default;
};

/// 1-based image list: position j of the result takes the old element p[j].
using Permutation = std::vector<std::size_t>;

/// Alias parameter -> path into the selected type expression.
using ArgMap = std::map<Name, Path>;

bool isConId(const std::string& s);
bool isVarId(const std::string& s);

/// Expands every alias application, recursively.
TypeExpr expandFull(const Module& m, const TypeExpr& t);
/// Expands alias applications at the root only.
TypeExpr expandHead(const Module& m, const TypeExpr& t);

Module renameType(const Module& m, const Name& oldName, const Name& newName);
Module renameConsDecl(const Module& m, const Name& oldName, const Name& newName);
Module permuteTypeParams(const Module& m, const Name& ty, const Permutation& p);
Module permuteConsDecl(const Module& m, const Name& cons, const Permutation& p);

Module introduce(const Module& m, const std::vector<Decl>& decls);
Module eliminate(const Module& m, const std::vector<Name>& names);

/// Without an argument map, the alias parameters are bound by matching the
/// alias right-hand side against the selected expression.
Module foldAlias(const Module& m, const TypeSel& sel, const TypeHdr& hdr,
                 const std::optional<ArgMap>& argMap = std::nullopt);
Module unfoldAlias(const Module& m, const TypeSel& sel);

Module groupComponents(const Module& m, const CompRangeSel& r);
Module ungroupComponent(const Module& m, const Name& ty, const Name& cons,
                        std::size_t index);

Module alias2newtype(const Module& m, const Name& ty, const Name& cons);
Module newtype2alias(const Module& m, const Name& ty);
Module newtype2data(const Module& m, const Name& ty);
Module data2newtype(const Module& m, const Name& ty);

Module swapAlias(const Module& m, const Name& oldTy, const Name& newTy,
                 const TypeSel& sel);
/// Throws UnifierInvalid with the reason.
void validateUnifiers(const Module& m, const std::vector<DataUnifier>& us);
Module swapData(const Module& m, const std::vector<DataUnifier>& us,
                const TypeSel& sel);

/// `position` is 1-based; 0 means after the last constructor.
Module includeCons(const Module& m, const Name& ty, const ConsDecl& c,
                   std::size_t position = 0);
Module excludeCons(const Module& m, const Name& ty, const Name& cons);
Module insertComponent(const Module& m, const Name& cons, std::size_t i,
                       const TypeExpr& c);
Module deleteComponent(const Module& m, const Name& cons, std::size_t i);

}  // namespace dtr
