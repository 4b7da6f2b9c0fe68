#pragma once

// MiniFun text format.
//
//   module   := { decl ";" }
//   decl     := "type" ConId tyvar* "=" type
//             | "newtype" ConId tyvar* "=" ConId atype
//             | "data" ConId tyvar* "=" consdecl { "|" consdecl }
//             | varid "::" type
//             | varid apat* "=" expr        (contiguous equations group)
//   type     := btype [ "->" type ]
//   btype    := ConId atype* | atype
//   atype    := tyvar | ConId | "(" type { "," type } ")" | "[" type "]"
//   expr     := "\" varid+ "->" expr | "case" expr "of" "{" alt {";" alt} "}"
//             | aexpr+
//
// Focus markers `{! ... !}` wrap a type name, a type expression, or a run of
// constructor components. `--` starts a line comment.

#include <string>
#include <string_view>
#include <vector>

#include "dtr/syntax.hpp"

namespace dtr {

/// Parses and checks the module invariants. Throws SyntaxError, or Error with
/// DuplicateName / ArityMismatch / IllFormed / MultipleFoci.
Module parseModule(std::string_view text);
/// Parses without checking the module invariants.
Module parseModuleUnchecked(std::string_view text);
/// A list of declarations; the final `;` is optional.
std::vector<Decl> parseDecls(std::string_view text);
TypeExpr parseTypeFragment(std::string_view text);
ConsDecl parseConsDecl(std::string_view text);
Expr parseExpr(std::string_view text);

/// A printed fragment's character range. Kinds: "decl" (ref = declared
/// name), "type" (ref = selector), "equation" (ref = fun/index),
/// "undefined" and "todo" (ref = to-do coordinate).
struct Span {
  std::string kind;
  std::string ref;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::string printModule(const Module& m);
std::string printModule(const Module& m, std::vector<Span>& spans);
std::string printDecl(const Decl& d);
std::string printType(const TypeExpr& t);
std::string printExpr(const Expr& e);
std::string printPattern(const Pattern& p);
std::string printConsDecl(const ConsDecl& c);

}  // namespace dtr
