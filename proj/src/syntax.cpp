#include "dtr/syntax.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "dtr/error.hpp"

namespace dtr {

// ---------------------------------------------------------------------------
// Constructors

TypeExpr TypeExpr::var(Name v) { return {Kind::Var, std::move(v), {}}; }
TypeExpr TypeExpr::app(Name n, std::vector<TypeExpr> as) {
  return {Kind::App, std::move(n), std::move(as)};
}
TypeExpr TypeExpr::fun(TypeExpr from, TypeExpr to) {
  return {Kind::Fun, {}, {std::move(from), std::move(to)}};
}
TypeExpr TypeExpr::tuple(std::vector<TypeExpr> elems) {
  return {Kind::Tuple, {}, std::move(elems)};
}
TypeExpr TypeExpr::list(TypeExpr elem) {
  return {Kind::List, {}, {std::move(elem)}};
}
TypeExpr TypeExpr::focus(TypeExpr inner) {
  return {Kind::Focus, {}, {std::move(inner)}};
}
TypeExpr TypeExpr::focusName(Name n, std::vector<TypeExpr> as) {
  return {Kind::FocusName, std::move(n), std::move(as)};
}

const TypeExpr& unfocused(const TypeExpr& t) {
  const TypeExpr* p = &t;
  while (p->kind == TypeExpr::Kind::Focus) p = &p->args.front();
  return *p;
}

Pattern Pattern::var(Name v) {
  Pattern p;
  p.kind = Kind::Var;
  p.name = std::move(v);
  return p;
}
Pattern Pattern::wild() { return Pattern{}; }
Pattern Pattern::con(Name c, std::vector<Pattern> ps) {
  Pattern p;
  p.kind = Kind::Con;
  p.name = std::move(c);
  p.args = std::move(ps);
  return p;
}
Pattern Pattern::tuple(std::vector<Pattern> ps) {
  Pattern p;
  p.kind = Kind::Tuple;
  p.args = std::move(ps);
  return p;
}
Pattern Pattern::literal(Literal l) {
  Pattern p;
  p.kind = Kind::Lit;
  p.lit = std::move(l);
  return p;
}

Expr Expr::var(Name v) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(v);
  return e;
}
Expr Expr::con(Name c) {
  Expr e;
  e.kind = Kind::Con;
  e.name = std::move(c);
  return e;
}
Expr Expr::app(Expr f, Expr a) {
  Expr e;
  e.kind = Kind::App;
  e.kids.push_back(std::move(f));
  e.kids.push_back(std::move(a));
  return e;
}
Expr Expr::apply(Expr head, std::vector<Expr> args) {
  for (auto& a : args) head = app(std::move(head), std::move(a));
  return head;
}
Expr Expr::lam(std::vector<Name> ps, Expr body) {
  Expr e;
  e.kind = Kind::Lam;
  e.params = std::move(ps);
  e.kids.push_back(std::move(body));
  return e;
}
Expr Expr::caseOf(Expr scrutinee, std::vector<Alt> alts) {
  Expr e;
  e.kind = Kind::Case;
  e.kids.push_back(std::move(scrutinee));
  e.alts = std::move(alts);
  return e;
}
Expr Expr::tuple(std::vector<Expr> es) {
  Expr e;
  e.kind = Kind::Tuple;
  e.kids = std::move(es);
  return e;
}
Expr Expr::list(std::vector<Expr> es) {
  Expr e;
  e.kind = Kind::List;
  e.kids = std::move(es);
  return e;
}
Expr Expr::undefined(unsigned todoTag) {
  Expr e;
  e.kind = Kind::Undefined;
  e.todo = todoTag;
  return e;
}
Expr Expr::literal(Literal l) {
  Expr e;
  e.kind = Kind::Lit;
  e.lit = std::move(l);
  return e;
}

bool Expr::operator==(const Expr&) const = default;

Spine spineOf(const Expr& e) {
  Spine s;
  const Expr* p = &e;
  std::vector<const Expr*> rev;
  while (p->kind == Expr::Kind::App) {
    rev.push_back(&p->kids[1]);
    p = &p->kids[0];
  }
  s.head = *p;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) s.args.push_back(**it);
  return s;
}

// ---------------------------------------------------------------------------
// Module lookups

const Decl* Module::findType(const Name& n) const {
  for (const auto& d : decls)
    if (d.isTypeDecl() && d.name == n) return &d;
  return nullptr;
}

Decl* Module::findType(const Name& n) {
  for (auto& d : decls)
    if (d.isTypeDecl() && d.name == n) return &d;
  return nullptr;
}

std::optional<ConsRef> Module::findCons(const Name& c) const {
  for (const auto& d : decls) {
    if (d.kind != Decl::Kind::Data && d.kind != Decl::Kind::Newtype) continue;
    for (std::size_t i = 0; i < d.conss.size(); ++i)
      if (d.conss[i].name == c) return ConsRef{&d, &d.conss[i], i};
  }
  return std::nullopt;
}

const Decl* Module::findSig(const Name& fun) const {
  for (const auto& d : decls)
    if (d.kind == Decl::Kind::Sig && d.name == fun) return &d;
  return nullptr;
}

const Decl* Module::findFun(const Name& fun) const {
  for (const auto& d : decls)
    if (d.kind == Decl::Kind::Fun && d.name == fun) return &d;
  return nullptr;
}

Decl* Module::findFun(const Name& fun) {
  for (auto& d : decls)
    if (d.kind == Decl::Kind::Fun && d.name == fun) return &d;
  return nullptr;
}

bool isBuiltinType(const Name& n) { return n == "Int" || n == "String"; }

// ---------------------------------------------------------------------------
// Type utilities

namespace {

void collectTypeVars(const TypeExpr& t, std::vector<Name>& out) {
  if (t.kind == TypeExpr::Kind::Var) {
    if (std::find(out.begin(), out.end(), t.name) == out.end())
      out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collectTypeVars(a, out);
}

}  // namespace

std::set<Name> freeTypeVars(const TypeExpr& t) {
  auto v = typeVarsInOrder(t);
  return {v.begin(), v.end()};
}

std::vector<Name> typeVarsInOrder(const TypeExpr& t) {
  std::vector<Name> out;
  collectTypeVars(t, out);
  return out;
}

bool mentionsType(const TypeExpr& t, const Name& n) {
  if (t.isApp() && t.name == n) return true;
  for (const auto& a : t.args)
    if (mentionsType(a, n)) return true;
  return false;
}

std::vector<ConsDecl> constructorsOf(const Module& m, const Name& ty) {
  const Decl* d = m.findType(ty);
  if (!d) fail(ErrorCode::UnknownType, "type " + ty + " is not declared");
  if (d->kind == Decl::Kind::Alias)
    fail(ErrorCode::KindMismatch, ty + " is a type alias, not a datatype");
  return d->conss;
}

TypeExpr stripFocus(TypeExpr t) {
  if (t.kind == TypeExpr::Kind::Focus) return stripFocus(std::move(t.args[0]));
  if (t.kind == TypeExpr::Kind::FocusName) t.kind = TypeExpr::Kind::App;
  for (auto& a : t.args) a = stripFocus(std::move(a));
  return t;
}

Module stripFocus(Module m) {
  for (auto& d : m.decls) {
    d.nameFocused = false;
    d.type = stripFocus(std::move(d.type));
    for (auto& c : d.conss) {
      c.focus.reset();
      for (auto& t : c.components) t = stripFocus(std::move(t));
    }
  }
  return m;
}

namespace {

std::size_t countTypeFoci(const TypeExpr& t) {
  std::size_t n = (t.kind == TypeExpr::Kind::Focus ||
                   t.kind == TypeExpr::Kind::FocusName)
                      ? 1
                      : 0;
  for (const auto& a : t.args) n += countTypeFoci(a);
  return n;
}

}  // namespace

std::size_t countFoci(const Module& m) {
  std::size_t n = 0;
  for (const auto& d : m.decls) {
    if (d.nameFocused) ++n;
    if (d.kind == Decl::Kind::Alias || d.kind == Decl::Kind::Sig)
      n += countTypeFoci(d.type);
    for (const auto& c : d.conss) {
      if (c.focus) ++n;
      for (const auto& t : c.components) n += countTypeFoci(t);
    }
  }
  return n;
}

TypeExpr substType(const TypeExpr& t,
                   const std::vector<std::pair<Name, TypeExpr>>& sub) {
  if (t.kind == TypeExpr::Kind::Var) {
    for (const auto& [v, r] : sub)
      if (v == t.name) return r;
    return t;
  }
  TypeExpr out = t;
  for (auto& a : out.args) a = substType(a, sub);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form and alpha-equivalence

namespace {

class Canonicalizer {
 public:
  Decl decl(const Decl& d) {
    Decl out = d;
    out.nameFocused = false;
    if (d.kind == Decl::Kind::Sig) {
      out.type = renameTypeVars(d.type, typeVarsInOrder(d.type));
      return out;
    }
    if (d.kind == Decl::Kind::Fun) {
      for (auto& eq : out.equations) eq = equation(eq);
      return out;
    }
    for (std::size_t i = 0; i < d.params.size(); ++i)
      out.params[i] = "'" + std::to_string(i + 1);
    out.type = renameTypeVars(d.type, d.params);
    for (auto& c : out.conss) {
      c.focus.reset();
      for (auto& t : c.components) t = renameTypeVars(t, d.params);
    }
    return out;
  }

 private:
  using Scope = std::vector<std::pair<Name, Name>>;

  static TypeExpr renameTypeVars(const TypeExpr& t,
                                 const std::vector<Name>& vars) {
    std::vector<std::pair<Name, TypeExpr>> sub;
    for (std::size_t i = 0; i < vars.size(); ++i)
      sub.emplace_back(vars[i], TypeExpr::var("'" + std::to_string(i + 1)));
    return substType(stripFocus(t), sub);
  }

  Equation equation(const Equation& eq) {
    counter_ = 0;
    Scope scope;
    Equation out = eq;
    for (auto& p : out.patterns) p = pattern(p, scope);
    out.rhs = expr(eq.rhs, scope);
    return out;
  }

  Name fresh() { return "%" + std::to_string(++counter_); }

  Pattern pattern(const Pattern& p, Scope& scope) {
    Pattern out = p;
    if (p.kind == Pattern::Kind::Var) {
      out.name = fresh();
      scope.emplace_back(p.name, out.name);
    }
    for (auto& a : out.args) a = pattern(a, scope);
    return out;
  }

  static Name lookup(const Scope& scope, const Name& n) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == n) return it->second;
    return n;
  }

  Expr expr(const Expr& e, const Scope& scope) {
    Expr out = e;
    out.todo = 0;
    out.pumped = false;
    switch (e.kind) {
      case Expr::Kind::Var:
        out.name = lookup(scope, e.name);
        return out;
      case Expr::Kind::Lam: {
        Scope inner = scope;
        for (auto& p : out.params) {
          Name f = fresh();
          inner.emplace_back(p, f);
          p = f;
        }
        out.kids[0] = expr(e.kids[0], inner);
        return out;
      }
      case Expr::Kind::Case: {
        out.kids[0] = expr(e.kids[0], scope);
        for (auto& alt : out.alts) {
          Scope inner = scope;
          alt.pat = pattern(alt.pat, inner);
          alt.rhs = expr(alt.rhs, inner);
        }
        return out;
      }
      default:
        for (auto& k : out.kids) k = expr(k, scope);
        return out;
    }
  }

  int counter_ = 0;
};

}  // namespace

Module canonicalize(const Module& m) {
  Module out;
  Canonicalizer c;
  for (const auto& d : m.decls) out.decls.push_back(c.decl(d));
  return out;
}

bool alphaEq(const Module& a, const Module& b) {
  return canonicalize(a) == canonicalize(b);
}

bool alphaEqTypes(const TypeExpr& a, const TypeExpr& b) {
  Decl da;
  da.kind = Decl::Kind::Sig;
  da.type = a;
  Decl db = da;
  db.type = b;
  Module ma{{da}}, mb{{db}};
  return alphaEq(ma, mb);
}

// ---------------------------------------------------------------------------
// Name collection

void collectNames(const Pattern& p, std::set<Name>& out) {
  if (p.kind == Pattern::Kind::Var) out.insert(p.name);
  for (const auto& a : p.args) collectNames(a, out);
}

void collectNames(const Expr& e, std::set<Name>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.name);
  for (const auto& p : e.params) out.insert(p);
  for (const auto& k : e.kids) collectNames(k, out);
  for (const auto& alt : e.alts) {
    collectNames(alt.pat, out);
    collectNames(alt.rhs, out);
  }
}

std::set<Name> namesIn(const Equation& eq) {
  std::set<Name> out;
  for (const auto& p : eq.patterns) collectNames(p, out);
  collectNames(eq.rhs, out);
  return out;
}

void patternVars(const Pattern& p, std::vector<Name>& out) {
  if (p.kind == Pattern::Kind::Var) out.push_back(p.name);
  for (const auto& a : p.args) patternVars(a, out);
}

bool patternMentionsCons(const Pattern& p, const Name& cons) {
  if (p.kind == Pattern::Kind::Con && p.name == cons) return true;
  for (const auto& a : p.args)
    if (patternMentionsCons(a, cons)) return true;
  return false;
}

bool exprMentionsCons(const Expr& e, const Name& cons) {
  if (e.kind == Expr::Kind::Con && e.name == cons) return true;
  for (const auto& k : e.kids)
    if (exprMentionsCons(k, cons)) return true;
  for (const auto& alt : e.alts)
    if (patternMentionsCons(alt.pat, cons) || exprMentionsCons(alt.rhs, cons))
      return true;
  return false;
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

class WellFormedness {
 public:
  explicit WellFormedness(const Module& m) : m_(m) {}

  void run() {
    std::set<Name> types, conss, sigs, funs;
    for (const auto& d : m_.decls) {
      switch (d.kind) {
        case Decl::Kind::Alias:
        case Decl::Kind::Newtype:
        case Decl::Kind::Data:
          if (isBuiltinType(d.name) || !types.insert(d.name).second)
            fail(ErrorCode::DuplicateName, "type " + d.name + " declared twice");
          for (const auto& c : d.conss)
            if (!conss.insert(c.name).second)
              fail(ErrorCode::DuplicateName,
                   "constructor " + c.name + " declared twice");
          break;
        case Decl::Kind::Sig:
          if (!sigs.insert(d.name).second)
            fail(ErrorCode::DuplicateName,
                 "function " + d.name + " has two signatures");
          break;
        case Decl::Kind::Fun:
          if (!funs.insert(d.name).second)
            fail(ErrorCode::DuplicateName,
                 "equations for " + d.name + " are not contiguous");
          break;
      }
    }
    for (const auto& d : m_.decls) decl(d);
    checkAliasCycles();
    if (countFoci(m_) > 1)
      fail(ErrorCode::MultipleFoci, "a module carries at most one focus");
  }

 private:
  void decl(const Decl& d) {
    std::set<Name> params;
    for (const auto& p : d.params)
      if (!params.insert(p).second)
        fail(ErrorCode::DuplicateName,
             "type parameter " + p + " repeated in " + d.name);
    switch (d.kind) {
      case Decl::Kind::Alias:
        type(d.type, &params, d.name);
        break;
      case Decl::Kind::Newtype:
        if (d.conss.size() != 1 || d.conss[0].components.size() != 1)
          fail(ErrorCode::IllFormed,
               "newtype " + d.name +
                   " needs exactly one constructor with one component");
        [[fallthrough]];
      case Decl::Kind::Data:
        if (d.conss.empty())
          fail(ErrorCode::IllFormed, "datatype " + d.name + " has no constructors");
        for (const auto& c : d.conss) {
          for (const auto& t : c.components) type(t, &params, d.name);
          if (c.focus && (c.focus->start < 1 || c.focus->count < 1 ||
                          c.focus->start + c.focus->count - 1 >
                              c.components.size()))
            fail(ErrorCode::IllFormed, "component focus out of range in " + c.name);
        }
        break;
      case Decl::Kind::Sig:
        type(d.type, nullptr, d.name);
        break;
      case Decl::Kind::Fun:
        function(d);
        break;
    }
  }

  void type(const TypeExpr& t, const std::set<Name>* params, const Name& where) {
    switch (t.kind) {
      case TypeExpr::Kind::Var:
        if (params && !params->count(t.name))
          fail(ErrorCode::IllFormed,
               "type variable " + t.name + " is not a parameter of " + where);
        return;
      case TypeExpr::Kind::App:
      case TypeExpr::Kind::FocusName: {
        std::size_t arity = 0;
        if (!isBuiltinType(t.name)) {
          const Decl* d = m_.findType(t.name);
          if (!d)
            fail(ErrorCode::IllFormed,
                 "type " + t.name + " used in " + where + " is not declared");
          arity = d->params.size();
        }
        if (t.args.size() != arity)
          fail(ErrorCode::IllFormed, "type " + t.name + " expects " +
                                         std::to_string(arity) + " arguments in " +
                                         where);
        break;
      }
      case TypeExpr::Kind::Tuple:
        if (t.args.size() < 2)
          fail(ErrorCode::IllFormed, "tuple type needs two or more elements");
        break;
      default:
        break;
    }
    for (const auto& a : t.args) type(a, params, where);
  }

  void function(const Decl& d) {
    if (d.equations.empty())
      fail(ErrorCode::IllFormed, "function " + d.name + " has no equations");
    const std::size_t arity = d.equations.front().patterns.size();
    for (std::size_t i = 0; i < d.equations.size(); ++i) {
      const auto& eq = d.equations[i];
      const std::string loc = d.name + "/" + std::to_string(i + 1);
      if (eq.fun != d.name)
        fail(ErrorCode::IllFormed, "equation for " + eq.fun + " inside " + d.name);
      if (eq.patterns.size() != arity)
        fail(ErrorCode::ArityMismatch,
             "equations of " + d.name + " differ in arity", {loc});
      std::vector<Name> vars;
      for (const auto& p : eq.patterns) {
        patternVars(p, vars);
        pattern(p, loc);
      }
      distinct(vars, loc);
      expr(eq.rhs, loc);
    }
  }

  static void distinct(std::vector<Name> vars, const std::string& loc) {
    std::sort(vars.begin(), vars.end());
    auto dup = std::adjacent_find(vars.begin(), vars.end());
    if (dup != vars.end())
      fail(ErrorCode::IllFormed, "pattern variable " + *dup + " bound twice",
           {loc});
  }

  void pattern(const Pattern& p, const std::string& loc) {
    if (p.kind == Pattern::Kind::Con) {
      auto c = m_.findCons(p.name);
      if (!c)
        fail(ErrorCode::IllFormed, "constructor " + p.name + " is not declared",
             {loc});
      if (c->cons->components.size() != p.args.size())
        fail(ErrorCode::ArityMismatch,
             "pattern " + p.name + " has " + std::to_string(p.args.size()) +
                 " arguments, constructor has " +
                 std::to_string(c->cons->components.size()),
             {loc});
    }
    if (p.kind == Pattern::Kind::Tuple && p.args.size() < 2)
      fail(ErrorCode::IllFormed, "tuple pattern needs two or more elements",
           {loc});
    for (const auto& a : p.args) pattern(a, loc);
  }

  void expr(const Expr& e, const std::string& loc) {
    if (e.kind == Expr::Kind::Con && !m_.findCons(e.name))
      fail(ErrorCode::IllFormed, "constructor " + e.name + " is not declared",
           {loc});
    if (e.kind == Expr::Kind::Lam && e.params.empty())
      fail(ErrorCode::IllFormed, "lambda without parameters", {loc});
    if (e.kind == Expr::Kind::Tuple && e.kids.size() < 2)
      fail(ErrorCode::IllFormed, "tuple needs two or more elements", {loc});
    for (const auto& k : e.kids) expr(k, loc);
    for (const auto& alt : e.alts) {
      std::vector<Name> vars;
      patternVars(alt.pat, vars);
      distinct(vars, loc);
      pattern(alt.pat, loc);
      expr(alt.rhs, loc);
    }
  }

  void checkAliasCycles() const {
    std::map<Name, int> state;  // 1 = visiting, 2 = done
    std::function<void(const Name&)> visit = [&](const Name& n) {
      const Decl* d = m_.findType(n);
      if (!d || d->kind != Decl::Kind::Alias) return;
      int& s = state[n];
      if (s == 2) return;
      if (s == 1) fail(ErrorCode::IllFormed, "cyclic type alias " + n);
      s = 1;
      std::function<void(const TypeExpr&)> walk = [&](const TypeExpr& t) {
        if (t.isApp()) visit(t.name);
        for (const auto& a : t.args) walk(a);
      };
      walk(d->type);
      state[n] = 2;
    };
    for (const auto& d : m_.decls)
      if (d.kind == Decl::Kind::Alias) visit(d.name);
  }

  const Module& m_;
};

}  // namespace

void checkWellFormed(const Module& m) { WellFormedness(m).run(); }

bool wellFormed(const Module& m) {
  try {
    checkWellFormed(m);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace dtr
