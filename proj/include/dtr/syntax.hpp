#pragma once

// Abstract syntax of MiniFun, the object language the datatype operators
// act on. Every node is a plain value; operators return new modules.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace dtr {

using Name = std::string;

struct TypeExpr {
  enum class Kind { Var, App, Fun, Tuple, List, Focus, FocusName };

  Kind kind = Kind::App;
  /// Type variable for Var, type name for App and FocusName.
  Name name;
  /// App/FocusName: arguments. Fun: {from, to}. Tuple: elements.
  /// List: {element}. Focus: {inner}.
  std::vector<TypeExpr> args;

  static TypeExpr var(Name v);
  static TypeExpr app(Name n, std::vector<TypeExpr> as = {});
  static TypeExpr fun(TypeExpr from, TypeExpr to);
  static TypeExpr tuple(std::vector<TypeExpr> elems);
  static TypeExpr list(TypeExpr elem);
  static TypeExpr focus(TypeExpr inner);
  static TypeExpr focusName(Name n, std::vector<TypeExpr> as = {});

  /// App or FocusName: a type name applied to arguments.
  bool isApp() const noexcept {
    return kind == Kind::App || kind == Kind::FocusName;
  }

  bool operator==(const TypeExpr&) const = default;
};

/// Skips Focus wrappers.
const TypeExpr& unfocused(const TypeExpr& t);

struct Literal {
  std::variant<long long, std::string> value;

  bool isString() const noexcept { return value.index() == 1; }
  bool operator==(const Literal&) const = default;
};

struct Pattern {
  enum class Kind { Var, Wild, Con, Tuple, Lit };

  Kind kind = Kind::Wild;
  Name name;  // Var: variable, Con: constructor
  std::vector<Pattern> args;
  Literal lit;

  static Pattern var(Name v);
  static Pattern wild();
  static Pattern con(Name c, std::vector<Pattern> ps = {});
  static Pattern tuple(std::vector<Pattern> ps);
  static Pattern literal(Literal l);

  bool operator==(const Pattern&) const = default;
};

struct Alt;

struct Expr {
  enum class Kind { Var, Con, App, Lam, Case, Tuple, List, Undefined, Lit };

  Kind kind = Kind::Undefined;
  Name name;                 // Var / Con
  std::vector<Name> params;  // Lam
  /// App: {fun, arg}. Lam: {body}. Case: {scrutinee}. Tuple/List: elements.
  std::vector<Expr> kids;
  std::vector<Alt> alts;  // Case
  Literal lit;
  /// Nonzero on `undefined` nodes planted as to-do markers by a program
  /// lift; the value identifies the transformation step that planted it.
  unsigned todo = 0;
  /// Set on lambdas a program lift introduced by eta-expanding a
  /// constructor, so that later lifts may contract them again.
  bool pumped = false;

  static Expr var(Name v);
  static Expr con(Name c);
  static Expr app(Expr f, Expr a);
  static Expr apply(Expr head, std::vector<Expr> args);
  static Expr lam(std::vector<Name> ps, Expr body);
  static Expr caseOf(Expr scrutinee, std::vector<Alt> alts);
  static Expr tuple(std::vector<Expr> es);
  static Expr list(std::vector<Expr> es);
  static Expr undefined(unsigned todoTag = 0);
  static Expr literal(Literal l);

  bool operator==(const Expr&) const;
};

struct Alt {
  Pattern pat;
  Expr rhs;

  bool operator==(const Alt&) const = default;
};

/// Head and arguments of an application spine `h a1 ... an`.
struct Spine {
  Expr head;
  std::vector<Expr> args;
};
Spine spineOf(const Expr& e);

struct Equation {
  Name fun;
  std::vector<Pattern> patterns;
  Expr rhs;

  bool operator==(const Equation&) const = default;
};

/// A contiguous run of constructor components marked by a focus.
struct CompRange {
  std::size_t start = 1;  // 1-based
  std::size_t count = 1;

  bool operator==(const CompRange&) const = default;
};

struct ConsDecl {
  Name name;
  std::vector<TypeExpr> components;
  std::optional<CompRange> focus;

  bool operator==(const ConsDecl&) const = default;
};

struct Decl {
  enum class Kind { Alias, Newtype, Data, Sig, Fun };

  Kind kind = Kind::Data;
  /// Type name for type declarations, function name for Sig and Fun.
  Name name;
  std::vector<Name> params;
  /// Alias right-hand side, or the signature type.
  TypeExpr type;
  std::vector<ConsDecl> conss;
  std::vector<Equation> equations;
  bool nameFocused = false;

  bool isTypeDecl() const noexcept {
    return kind == Kind::Alias || kind == Kind::Newtype || kind == Kind::Data;
  }
  bool operator==(const Decl&) const = default;
};

struct ConsRef {
  const Decl* type = nullptr;
  const ConsDecl* cons = nullptr;
  std::size_t index = 0;  // position within the type's constructor list
};

struct Module {
  std::vector<Decl> decls;

  const Decl* findType(const Name& n) const;
  std::optional<ConsRef> findCons(const Name& c) const;
  const Decl* findSig(const Name& fun) const;
  const Decl* findFun(const Name& fun) const;
  Decl* findType(const Name& n);
  Decl* findFun(const Name& fun);

  bool operator==(const Module&) const = default;
};

bool isBuiltinType(const Name& n);

std::set<Name> freeTypeVars(const TypeExpr& t);
/// Type variables in order of first occurrence.
std::vector<Name> typeVarsInOrder(const TypeExpr& t);
bool mentionsType(const TypeExpr& t, const Name& n);

/// Constructor list of a newtype or data declaration.
/// Throws UnknownType / KindMismatch.
std::vector<ConsDecl> constructorsOf(const Module& m, const Name& ty);

TypeExpr stripFocus(TypeExpr t);
Module stripFocus(Module m);
std::size_t countFoci(const Module& m);

/// Replaces bound names with canonical ones and drops focus markers and
/// to-do tags, so that structural equality coincides with alpha-equivalence.
Module canonicalize(const Module& m);
bool alphaEq(const Module& a, const Module& b);
bool alphaEqTypes(const TypeExpr& a, const TypeExpr& b);

/// Substitutes type variables.
TypeExpr substType(const TypeExpr& t,
                   const std::vector<std::pair<Name, TypeExpr>>& sub);

/// Throws DuplicateName, ArityMismatch or IllFormed on violation of the
/// module invariants.
void checkWellFormed(const Module& m);
bool wellFormed(const Module& m);

/// All variable names bound or referenced in an equation.
std::set<Name> namesIn(const Equation& eq);
void collectNames(const Expr& e, std::set<Name>& out);
void collectNames(const Pattern& p, std::set<Name>& out);
void patternVars(const Pattern& p, std::vector<Name>& out);
bool patternMentionsCons(const Pattern& p, const Name& cons);
bool exprMentionsCons(const Expr& e, const Name& cons);

}  // namespace dtr
