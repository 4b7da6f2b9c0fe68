#include "dtr/datatype_ops.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"
#include "dtr/program_lift.hpp"
#include "dtr/traversal.hpp"

namespace dtr {
namespace {

bool identChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

ConsDecl& consDecl(Module& m, const Name& c) {
  for (auto& d : m.decls)
    if (d.kind == Decl::Kind::Data || d.kind == Decl::Kind::Newtype)
      for (auto& cd : d.conss)
        if (cd.name == c) return cd;
  fail(ErrorCode::UnknownName, "no constructor " + c);
}

bool typeNameInUse(const Module& m, const Name& n) {
  return isBuiltinType(n) || m.findType(n);
}

void requireConId(const Name& n) {
  if (!isConId(n)) fail(ErrorCode::BadArguments, "not a type or constructor name: " + n);
}

void checkPermutation(const Permutation& p, std::size_t n, const std::string& what) {
  std::vector<bool> seen(n, false);
  bool ok = p.size() == n;
  for (std::size_t i = 0; ok && i < p.size(); ++i) {
    ok = p[i] >= 1 && p[i] <= n && !seen[p[i] - 1];
    if (ok) seen[p[i] - 1] = true;
  }
  if (!ok) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i)
      s += (i ? "," : "") + std::to_string(p[i]);
    fail(ErrorCode::BadPermutation,
         "[" + s + "] is not a permutation of " + std::to_string(n) + " " + what);
  }
}

template <class T>
std::vector<T> permuted(const std::vector<T>& xs, const Permutation& p) {
  std::vector<T> out;
  out.reserve(xs.size());
  for (std::size_t j : p) out.push_back(xs[j - 1]);
  return out;
}

void requireBoundVars(const Decl& owner, const std::vector<TypeExpr>& ts) {
  std::set<Name> params(owner.params.begin(), owner.params.end());
  for (const auto& t : ts)
    for (const auto& v : freeTypeVars(t))
      if (!params.count(v))
        fail(ErrorCode::UnboundTypeVar,
             "type variable " + v + " is not a parameter of " + owner.name);
}

Decl& ownerOfCons(Module& m, const Name& cons) {
  for (auto& d : m.decls)
    if (d.kind == Decl::Kind::Data || d.kind == Decl::Kind::Newtype)
      for (const auto& c : d.conss)
        if (c.name == cons) return d;
  fail(ErrorCode::NotADataOrNewtypeCons,
       cons + " is not a constructor of a datatype or newtype");
}

// First-order matching of `pat` (over alias parameters) against `t`.
bool match(const TypeExpr& pat, const TypeExpr& t, const std::set<Name>& params,
           std::map<Name, TypeExpr>& bind) {
  if (pat.kind == TypeExpr::Kind::Var && params.count(pat.name)) {
    auto [it, fresh] = bind.emplace(pat.name, t);
    return fresh || it->second == t;
  }
  if (pat.kind != t.kind || pat.name != t.name || pat.args.size() != t.args.size())
    return false;
  for (std::size_t i = 0; i < pat.args.size(); ++i)
    if (!match(pat.args[i], t.args[i], params, bind)) return false;
  return true;
}

const TypeExpr* descend(const TypeExpr& t, const Path& p) {
  const TypeExpr* cur = &t;
  for (std::size_t step : p) {
    if (cur->kind == TypeExpr::Kind::Var || step < 1 || step > cur->args.size())
      return nullptr;
    cur = &cur->args[step - 1];
  }
  return cur;
}

std::vector<std::pair<Name, TypeExpr>> zipVars(const std::vector<Name>& names,
                                               const std::vector<TypeExpr>& ts) {
  std::vector<std::pair<Name, TypeExpr>> out;
  for (std::size_t i = 0; i < names.size() && i < ts.size(); ++i)
    out.push_back({names[i], ts[i]});
  return out;
}

std::vector<TypeExpr> varsOf(const std::vector<Name>& names) {
  std::vector<TypeExpr> out;
  for (const auto& n : names) out.push_back(TypeExpr::var(n));
  return out;
}

}  // namespace

DataUnifier DataUnifier::inverse() const {
  DataUnifier u{newTy, oldTy, {}};
  for (const auto& [o, n] : consPairs) u.consPairs.push_back({n, o});
  return u;
}

bool isConId(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])) &&
         std::all_of(s.begin(), s.end(), identChar);
}

bool isVarId(const std::string& s) {
  static const std::set<std::string> kKeywords = {"type", "newtype", "data",
                                                  "case", "of", "undefined"};
  return !s.empty() &&
         (std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_') &&
         s != "_" && std::all_of(s.begin(), s.end(), identChar) &&
         !kKeywords.count(s);
}

TypeExpr expandHead(const Module& m, const TypeExpr& t) {
  TypeExpr cur = stripFocus(t);
  for (int guard = 0; guard < 1000 && cur.isApp(); ++guard) {
    const Decl* d = m.findType(cur.name);
    if (!d || d->kind != Decl::Kind::Alias || d->params.size() != cur.args.size())
      break;
    cur = substType(stripFocus(d->type), zipVars(d->params, cur.args));
  }
  return cur;
}

TypeExpr expandFull(const Module& m, const TypeExpr& t) {
  TypeExpr h = expandHead(m, t);
  for (auto& a : h.args) a = expandFull(m, a);
  return h;
}

Module renameType(const Module& m, const Name& oldName, const Name& newName) {
  if (!m.findType(oldName)) fail(ErrorCode::UnknownName, "no type " + oldName);
  requireConId(newName);
  if (oldName == newName) return m;
  if (typeNameInUse(m, newName))
    fail(ErrorCode::NameClash, "type name " + newName + " is already in use");
  Module out = mapTypes(m, [&](TypeExpr t) {
    if (t.isApp() && t.name == oldName) t.name = newName;
    return t;
  });
  out.findType(oldName)->name = newName;
  return out;
}

Module renameConsDecl(const Module& m, const Name& oldName, const Name& newName) {
  if (!m.findCons(oldName)) fail(ErrorCode::UnknownName, "no constructor " + oldName);
  requireConId(newName);
  if (oldName == newName) return m;
  if (m.findCons(newName))
    fail(ErrorCode::NameClash, "constructor " + newName + " is already in use");
  Module out = m;
  consDecl(out, oldName).name = newName;
  return out;
}

Module permuteTypeParams(const Module& m, const Name& ty, const Permutation& p) {
  const Decl* d = m.findType(ty);
  if (!d) fail(ErrorCode::UnknownName, "no type " + ty);
  checkPermutation(p, d->params.size(), "type parameters of " + ty);
  Module out = mapTypes(m, [&](TypeExpr t) {
    if (t.isApp() && t.name == ty && t.args.size() == p.size())
      t.args = permuted(t.args, p);
    return t;
  });
  Decl& nd = *out.findType(ty);
  nd.params = permuted(nd.params, p);
  return out;
}

Module permuteConsDecl(const Module& m, const Name& cons, const Permutation& p) {
  Module out = m;
  ConsDecl& c = consDecl(out, cons);
  checkPermutation(p, c.components.size(), "components of " + cons);
  c.components = permuted(c.components, p);
  c.focus.reset();
  return out;
}

Module introduce(const Module& m, const std::vector<Decl>& decls) {
  std::set<Name> types, conss;
  for (const auto& d : decls) {
    if (!d.isTypeDecl())
      fail(ErrorCode::BadArguments, "only type declarations can be introduced");
    if (typeNameInUse(m, d.name) || !types.insert(d.name).second)
      fail(ErrorCode::NameClash, "type name " + d.name + " is already in use");
    for (const auto& c : d.conss)
      if (m.findCons(c.name) || !conss.insert(c.name).second)
        fail(ErrorCode::NameClash, "constructor " + c.name + " is already in use");
  }
  Module out = m;
  // new types go after the last type declaration
  auto pos = out.decls.begin();
  for (auto it = out.decls.begin(); it != out.decls.end(); ++it)
    if (it->isTypeDecl()) pos = it + 1;
  out.decls.insert(pos, decls.begin(), decls.end());
  checkWellFormed(out);
  return out;
}

Module eliminate(const Module& m, const std::vector<Name>& names) {
  std::set<Name> gone(names.begin(), names.end());
  for (const auto& n : names)
    if (!m.findType(n)) fail(ErrorCode::UnknownName, "no type " + n);
  std::vector<std::string> offenders = checkEliminate(m, names);
  if (!offenders.empty())
    fail(ErrorCode::StillReferenced, "eliminated types are still referenced", offenders);
  Module out = m;
  std::erase_if(out.decls,
                [&](const Decl& d) { return d.isTypeDecl() && gone.count(d.name); });
  return out;
}

Module foldAlias(const Module& m, const TypeSel& sel, const TypeHdr& hdr,
                 const std::optional<ArgMap>& argMap) {
  const Decl* a = m.findType(hdr.name);
  if (!a || a->kind != Decl::Kind::Alias)
    fail(ErrorCode::NotAnAlias, hdr.name + " is not a type alias");
  TypeExpr target = resolve(m, sel);
  if (sel.kind == TypeSel::Kind::AliasRhs && sel.owner == hdr.name)
    fail(ErrorCode::RhsMismatch, "cannot fold " + hdr.name + " into its own definition",
         {toString(sel)});

  std::vector<Name> params = a->params;
  TypeExpr rhs = stripFocus(a->type);
  if (!hdr.params.empty()) {
    if (hdr.params.size() != params.size())
      fail(ErrorCode::BadArgMap, hdr.name + " takes " + std::to_string(params.size()) +
                                     " parameters");
    rhs = substType(rhs, zipVars(params, varsOf(hdr.params)));
    params = hdr.params;
  }

  std::vector<TypeExpr> args;
  if (argMap) {
    if (argMap->size() != params.size())
      fail(ErrorCode::BadArgMap, "argument map must bind every parameter of " + hdr.name);
    for (const auto& p : params) {
      auto it = argMap->find(p);
      if (it == argMap->end())
        fail(ErrorCode::BadArgMap, "parameter " + p + " is not mapped");
      const TypeExpr* sub = descend(target, it->second);
      if (!sub)
        fail(ErrorCode::BadArgMap,
             "no position " + pathToString(it->second) + " in " + printType(target));
      args.push_back(*sub);
    }
  } else {
    std::map<Name, TypeExpr> bind;
    std::set<Name> ps(params.begin(), params.end());
    if (!match(rhs, target, ps, bind))
      fail(ErrorCode::RhsMismatch,
           printType(target) + " is not an instance of " + printType(rhs),
           {toString(sel)});
    for (const auto& p : params) {
      auto it = bind.find(p);
      if (it == bind.end())
        fail(ErrorCode::BadArgMap, "parameter " + p + " cannot be inferred");
      args.push_back(it->second);
    }
  }
  if (substType(rhs, zipVars(params, args)) != target)
    fail(ErrorCode::RhsMismatch,
         printType(target) + " does not coincide with the right-hand side of " +
             hdr.name,
         {toString(sel)});
  return replaceAt(m, sel, [&](const TypeExpr&) { return TypeExpr::app(hdr.name, args); });
}

Module unfoldAlias(const Module& m, const TypeSel& sel) {
  TypeExpr t = resolve(m, sel);
  const Decl* a = t.isApp() ? m.findType(t.name) : nullptr;
  if (!a || a->kind != Decl::Kind::Alias || a->params.size() != t.args.size())
    fail(ErrorCode::NotAliasApplication,
         printType(t) + " is not an application of a type alias", {toString(sel)});
  return replaceAt(m, sel, [&](const TypeExpr&) {
    return substType(stripFocus(a->type), zipVars(a->params, t.args));
  });
}

Module groupComponents(const Module& m, const CompRangeSel& r) {
  if (r.count < 2)
    fail(ErrorCode::BadRange, "grouping needs at least two components", {toString(r)});
  resolveRange(m, r);
  Module out = m;
  ConsDecl& c = consDecl(out, r.cons);
  auto first = c.components.begin() + static_cast<long>(r.start - 1);
  auto last = first + static_cast<long>(r.count);
  std::vector<TypeExpr> elems;
  for (auto it = first; it != last; ++it) elems.push_back(stripFocus(*it));
  c.components.erase(first, last);
  c.components.insert(c.components.begin() + static_cast<long>(r.start - 1),
                      TypeExpr::tuple(std::move(elems)));
  c.focus.reset();
  return out;
}

Module ungroupComponent(const Module& m, const Name& ty, const Name& cons,
                        std::size_t index) {
  TypeSel sel = TypeSel::consComp(ty, cons, index);
  TypeExpr t = resolve(m, sel);
  if (t.kind != TypeExpr::Kind::Tuple)
    fail(ErrorCode::NotATuple, printType(t) + " is not a tuple type", {toString(sel)});
  if (m.findType(ty)->kind == Decl::Kind::Newtype)
    fail(ErrorCode::KindMismatch, "a newtype constructor keeps exactly one component",
         {toString(sel)});
  Module out = m;
  ConsDecl& c = consDecl(out, cons);
  auto at = c.components.erase(c.components.begin() + static_cast<long>(index - 1));
  c.components.insert(at, t.args.begin(), t.args.end());
  c.focus.reset();
  return out;
}

Module alias2newtype(const Module& m, const Name& ty, const Name& cons) {
  const Decl* d = m.findType(ty);
  if (!d || d->kind != Decl::Kind::Alias)
    fail(ErrorCode::NotAnAlias, ty + " is not a type alias");
  requireConId(cons);
  if (m.findCons(cons))
    fail(ErrorCode::NameClash, "constructor " + cons + " is already in use");
  Module out = m;
  Decl& nd = *out.findType(ty);
  nd.kind = Decl::Kind::Newtype;
  nd.conss = {ConsDecl{cons, {stripFocus(nd.type)}, std::nullopt}};
  nd.type = TypeExpr{};
  return out;
}

Module newtype2alias(const Module& m, const Name& ty) {
  const Decl* d = m.findType(ty);
  if (!d || d->kind != Decl::Kind::Newtype)
    fail(ErrorCode::NotANewtype, ty + " is not a newtype");
  Module out = m;
  Decl& nd = *out.findType(ty);
  nd.kind = Decl::Kind::Alias;
  nd.type = stripFocus(nd.conss[0].components[0]);
  nd.conss.clear();
  return out;
}

Module newtype2data(const Module& m, const Name& ty) {
  const Decl* d = m.findType(ty);
  if (!d || d->kind != Decl::Kind::Newtype)
    fail(ErrorCode::NotANewtype, ty + " is not a newtype");
  Module out = m;
  out.findType(ty)->kind = Decl::Kind::Data;
  return out;
}

Module data2newtype(const Module& m, const Name& ty) {
  const Decl* d = m.findType(ty);
  if (!d || d->kind != Decl::Kind::Data || d->conss.size() != 1 ||
      d->conss[0].components.size() != 1)
    fail(ErrorCode::NotConvertibleToNewtype,
         ty + " is not a datatype with one single-component constructor");
  Module out = m;
  out.findType(ty)->kind = Decl::Kind::Newtype;
  return out;
}

Module swapAlias(const Module& m, const Name& oldTy, const Name& newTy,
                 const TypeSel& sel) {
  const Decl* o = m.findType(oldTy);
  const Decl* n = m.findType(newTy);
  if (!o || o->kind != Decl::Kind::Alias)
    fail(ErrorCode::NotAnAlias, oldTy + " is not a type alias");
  if (!n || n->kind != Decl::Kind::Alias)
    fail(ErrorCode::NotAnAlias, newTy + " is not a type alias");
  if (o->params.size() != n->params.size() ||
      substType(stripFocus(n->type), zipVars(n->params, varsOf(o->params))) !=
          stripFocus(o->type))
    fail(ErrorCode::NotEquivalent, oldTy + " and " + newTy + " are not equivalent");
  TypeExpr t = resolve(m, sel);
  if (!t.isApp() || t.name != oldTy)
    fail(ErrorCode::NotAnApplicationOfOld, printType(t) + " does not apply " + oldTy,
         {toString(sel)});
  return replaceAt(m, sel, [&](const TypeExpr& x) {
    TypeExpr y = x;
    y.kind = TypeExpr::Kind::App;
    y.name = newTy;
    return y;
  });
}

void validateUnifiers(const Module& m, const std::vector<DataUnifier>& us) {
  auto bad = [](const std::string& why) { fail(ErrorCode::UnifierInvalid, why); };
  if (us.empty()) bad("no unifier given");
  std::map<Name, Name> tyMap;
  for (const auto& u : us) {
    if (!tyMap.emplace(u.oldTy, u.newTy).second) bad(u.oldTy + " is unified twice");
    if (u.oldTy == u.newTy) bad(u.oldTy + " is unified with itself");
  }
  for (const auto& u : us) {
    const Decl* o = m.findType(u.oldTy);
    const Decl* n = m.findType(u.newTy);
    for (const auto* d : {o, n})
      if (!d || d->kind == Decl::Kind::Alias)
        bad((d == o ? u.oldTy : u.newTy) + " is not a datatype or newtype");
    if (o->params.size() != n->params.size())
      bad(u.oldTy + " and " + u.newTy + " differ in the number of parameters");
    if (u.consPairs.size() != o->conss.size() || u.consPairs.size() != n->conss.size())
      bad("constructor pairs must cover " + u.oldTy + " and " + u.newTy + " exactly");
    std::set<Name> seenOld, seenNew;
    for (const auto& [oc, nc] : u.consPairs) {
      const ConsDecl* ocd = nullptr;
      const ConsDecl* ncd = nullptr;
      for (const auto& c : o->conss)
        if (c.name == oc) ocd = &c;
      for (const auto& c : n->conss)
        if (c.name == nc) ncd = &c;
      if (!ocd) bad(oc + " is not a constructor of " + u.oldTy);
      if (!ncd) bad(nc + " is not a constructor of " + u.newTy);
      if (!seenOld.insert(oc).second || !seenNew.insert(nc).second)
        bad("constructor pairs are not a bijection");
      if (ocd->components.size() != ncd->components.size())
        bad(oc + " and " + nc + " differ in arity");
      for (std::size_t i = 0; i < ocd->components.size(); ++i) {
        TypeExpr want = everywhere(stripFocus(ocd->components[i]), [&](TypeExpr t) {
          if (t.isApp()) {
            auto it = tyMap.find(t.name);
            if (it != tyMap.end()) t.name = it->second;
          }
          return t;
        });
        TypeExpr got = substType(stripFocus(ncd->components[i]),
                                 zipVars(n->params, varsOf(o->params)));
        if (want != got)
          bad("component " + std::to_string(i + 1) + " of " + oc + " and " + nc +
              " differ: " + printType(want) + " vs " + printType(got));
      }
    }
  }
}

Module swapData(const Module& m, const std::vector<DataUnifier>& us,
                const TypeSel& sel) {
  validateUnifiers(m, us);
  TypeExpr t = resolve(m, sel);
  const DataUnifier* hit = nullptr;
  for (const auto& u : us)
    if (t.isApp() && t.name == u.oldTy) hit = &u;
  if (!hit)
    fail(ErrorCode::NotAnApplicationOfOld,
         printType(t) + " does not apply a unified type", {toString(sel)});
  return replaceAt(m, sel, [&](const TypeExpr& x) {
    TypeExpr y = x;
    y.kind = TypeExpr::Kind::App;
    y.name = hit->newTy;
    return y;
  });
}

Module includeCons(const Module& m, const Name& ty, const ConsDecl& c,
                   std::size_t position) {
  const Decl* d = m.findType(ty);
  if (!d) fail(ErrorCode::UnknownName, "no type " + ty);
  if (d->kind != Decl::Kind::Data)
    fail(ErrorCode::NotAData, ty + " is not a datatype");
  requireConId(c.name);
  if (m.findCons(c.name))
    fail(ErrorCode::NameClash, "constructor " + c.name + " is already in use");
  requireBoundVars(*d, c.components);
  if (position == 0) position = d->conss.size() + 1;
  if (position > d->conss.size() + 1)
    fail(ErrorCode::BadIndex, "position " + std::to_string(position) + " beyond " +
                                  std::to_string(d->conss.size() + 1));
  Module out = m;
  auto& cs = out.findType(ty)->conss;
  ConsDecl nc = c;
  nc.focus.reset();
  for (auto& t : nc.components) t = stripFocus(t);
  cs.insert(cs.begin() + static_cast<long>(position - 1), nc);
  return out;
}

Module excludeCons(const Module& m, const Name& ty, const Name& cons) {
  const Decl* d = m.findType(ty);
  if (!d) fail(ErrorCode::UnknownName, "no type " + ty);
  if (d->kind != Decl::Kind::Data)
    fail(ErrorCode::NotAData, ty + " is not a datatype");
  auto it = std::find_if(d->conss.begin(), d->conss.end(),
                         [&](const ConsDecl& c) { return c.name == cons; });
  if (it == d->conss.end())
    fail(ErrorCode::UnknownName, cons + " is not a constructor of " + ty);
  if (d->conss.size() == 1)
    fail(ErrorCode::LastConstructor, cons + " is the only constructor of " + ty);
  Module out = m;
  std::erase_if(out.findType(ty)->conss,
                [&](const ConsDecl& c) { return c.name == cons; });
  return out;
}

Module insertComponent(const Module& m, const Name& cons, std::size_t i,
                       const TypeExpr& c) {
  Module out = m;
  Decl& owner = ownerOfCons(out, cons);
  if (owner.kind == Decl::Kind::Newtype)
    fail(ErrorCode::NotANewtypeTarget,
         cons + " belongs to a newtype and must keep exactly one component");
  ConsDecl& cd = consDecl(out, cons);
  if (i < 1 || i > cd.components.size() + 1)
    fail(ErrorCode::BadIndex, "position " + std::to_string(i) + " outside 1.." +
                                  std::to_string(cd.components.size() + 1));
  requireBoundVars(owner, {c});
  cd.components.insert(cd.components.begin() + static_cast<long>(i - 1), stripFocus(c));
  cd.focus.reset();
  return out;
}

Module deleteComponent(const Module& m, const Name& cons, std::size_t i) {
  Module out = m;
  Decl& owner = ownerOfCons(out, cons);
  ConsDecl& cd = consDecl(out, cons);
  if (i < 1 || i > cd.components.size())
    fail(ErrorCode::BadIndex, "position " + std::to_string(i) + " outside 1.." +
                                  std::to_string(cd.components.size()));
  if (owner.kind == Decl::Kind::Newtype)
    fail(ErrorCode::NotANewtypeTarget,
         cons + " belongs to a newtype and must keep exactly one component");
  cd.components.erase(cd.components.begin() + static_cast<long>(i - 1));
  cd.focus.reset();
  return out;
}

}  // namespace dtr
