#include "dtr/focus.hpp"

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"

namespace dtr {
namespace {

TypeExpr& focusFree(TypeExpr& t) {
  TypeExpr* p = &t;
  while (p->kind == TypeExpr::Kind::Focus) p = &p->args[0];
  return *p;
}

const TypeExpr& rootOf(const Module& m, const TypeSel& sel) {
  std::string where = toString(sel);
  switch (sel.kind) {
    case TypeSel::Kind::AliasRhs:
    case TypeSel::Kind::NewtypeRhs: {
      const Decl* d = m.findType(sel.owner);
      if (!d) fail(ErrorCode::UnknownName, "no type " + sel.owner, {where});
      bool alias = sel.kind == TypeSel::Kind::AliasRhs;
      if (alias && d->kind != Decl::Kind::Alias)
        fail(ErrorCode::KindMismatch, sel.owner + " is not an alias", {where});
      if (!alias && d->kind != Decl::Kind::Newtype)
        fail(ErrorCode::KindMismatch, sel.owner + " is not a newtype", {where});
      return alias ? d->type : d->conss.at(0).components.at(0);
    }
    case TypeSel::Kind::ConsComp: {
      const Decl* d = m.findType(sel.owner);
      if (!d) fail(ErrorCode::UnknownName, "no type " + sel.owner, {where});
      if (d->kind == Decl::Kind::Alias)
        fail(ErrorCode::KindMismatch, sel.owner + " has no constructors", {where});
      for (const auto& c : d->conss) {
        if (c.name != sel.cons) continue;
        if (sel.index < 1 || sel.index > c.components.size())
          fail(ErrorCode::BadIndex,
               sel.cons + " has " + std::to_string(c.components.size()) +
                   " components",
               {where});
        return c.components[sel.index - 1];
      }
      fail(ErrorCode::UnknownName,
           "no constructor " + sel.cons + " in " + sel.owner, {where});
    }
    case TypeSel::Kind::SigType: {
      const Decl* d = m.findSig(sel.owner);
      if (!d) fail(ErrorCode::UnknownName, "no signature for " + sel.owner, {where});
      return d->type;
    }
  }
  fail(ErrorCode::BadArguments, "bad selector");
}

const TypeExpr& walk(const TypeExpr& root, const TypeSel& sel) {
  const TypeExpr* t = &unfocused(root);
  for (std::size_t step : sel.path) {
    if (t->kind == TypeExpr::Kind::Var || step < 1 || step > t->args.size())
      fail(ErrorCode::BadPath, "no child " + std::to_string(step) + " in " +
                                   printType(stripFocus(*t)),
           {toString(sel)});
    t = &unfocused(t->args[step - 1]);
  }
  return *t;
}

TypeExpr& mutableRoot(Module& m, const TypeSel& sel) {
  switch (sel.kind) {
    case TypeSel::Kind::AliasRhs: return m.findType(sel.owner)->type;
    case TypeSel::Kind::NewtypeRhs:
      return m.findType(sel.owner)->conss[0].components[0];
    case TypeSel::Kind::ConsComp:
      for (auto& c : m.findType(sel.owner)->conss)
        if (c.name == sel.cons) return c.components[sel.index - 1];
      break;
    case TypeSel::Kind::SigType:
      for (auto& d : m.decls)
        if (d.kind == Decl::Kind::Sig && d.name == sel.owner) return d.type;
      break;
  }
  fail(ErrorCode::UnknownName, toString(sel));
}

TypeExpr& mutableAt(Module& m, const TypeSel& sel) {
  TypeExpr* t = &focusFree(mutableRoot(m, sel));
  for (std::size_t step : sel.path) t = &focusFree(t->args[step - 1]);
  return *t;
}

template <class F>
void eachRoot(const Module& m, F&& f) {
  for (const auto& d : m.decls) {
    switch (d.kind) {
      case Decl::Kind::Alias: f(TypeSel::aliasRhs(d.name), d.type); break;
      case Decl::Kind::Newtype:
        f(TypeSel::newtypeRhs(d.name), d.conss[0].components[0]);
        break;
      case Decl::Kind::Data:
        for (const auto& c : d.conss)
          for (std::size_t i = 0; i < c.components.size(); ++i)
            f(TypeSel::consComp(d.name, c.name, i + 1), c.components[i]);
        break;
      case Decl::Kind::Sig: f(TypeSel::sigType(d.name), d.type); break;
      case Decl::Kind::Fun: break;
    }
  }
}

template <class F>
void preorder(const TypeSel& sel, const TypeExpr& t, F&& f) {
  const TypeExpr& u = unfocused(t);
  f(sel, u);
  for (std::size_t i = 0; i < u.args.size(); ++i)
    preorder(sel.child(i + 1), u.args[i], f);
}

// The selector of the unique focus node below `t`, if any.
std::optional<TypeSel> findFocus(const TypeSel& sel, const TypeExpr& t) {
  if (t.kind == TypeExpr::Kind::Focus || t.kind == TypeExpr::Kind::FocusName)
    return sel;
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (auto s = findFocus(sel.child(i + 1), t.args[i])) return s;
  return std::nullopt;
}

}  // namespace

TypeExpr resolve(const Module& m, const TypeSel& sel) {
  return stripFocus(walk(rootOf(m, sel), sel));
}

Module replaceAt(const Module& m, const TypeSel& sel,
                 const std::function<TypeExpr(const TypeExpr&)>& f) {
  TypeExpr old = resolve(m, sel);
  Module out = m;
  mutableAt(out, sel) = f(old);
  return out;
}

const ConsDecl& resolveRange(const Module& m, const CompRangeSel& r) {
  std::string where = toString(r);
  const Decl* d = m.findType(r.type);
  if (!d) fail(ErrorCode::UnknownName, "no type " + r.type, {where});
  if (d->kind == Decl::Kind::Alias)
    fail(ErrorCode::KindMismatch, r.type + " has no constructors", {where});
  for (const auto& c : d->conss) {
    if (c.name != r.cons) continue;
    if (r.start < 1 || r.count < 1 || r.start + r.count - 1 > c.components.size())
      fail(ErrorCode::BadRange,
           "range outside the " + std::to_string(c.components.size()) +
               " components of " + c.name,
           {where});
    return c;
  }
  fail(ErrorCode::UnknownName, "no constructor " + r.cons + " in " + r.type,
       {where});
}

FocusTarget focusToSelector(const Module& m) {
  std::size_t n = countFoci(m);
  if (n == 0) fail(ErrorCode::NoFocus, "module has no focus marker");
  if (n > 1)
    fail(ErrorCode::MultipleFoci, std::to_string(n) + " focus markers");
  for (const auto& d : m.decls) {
    if (d.nameFocused) return TypeNameSel{d.name};
    for (const auto& c : d.conss)
      if (c.focus) return CompRangeSel{d.name, c.name, c.focus->start, c.focus->count};
  }
  std::optional<TypeSel> found;
  eachRoot(m, [&](const TypeSel& sel, const TypeExpr& t) {
    if (!found) found = findFocus(sel, t);
  });
  if (!found) fail(ErrorCode::NoFocus, "module has no focus marker");
  return *found;
}

Module selectorToFocus(const Module& m, const FocusTarget& target) {
  if (countFoci(m) > 0)
    fail(ErrorCode::AlreadyFocused, "module already carries a focus marker");
  Module out = m;
  if (const auto* sel = std::get_if<TypeSel>(&target)) {
    resolve(m, *sel);
    TypeExpr& t = mutableAt(out, *sel);
    t = TypeExpr::focus(std::move(t));
  } else if (const auto* r = std::get_if<CompRangeSel>(&target)) {
    resolveRange(m, *r);
    for (auto& c : out.findType(r->type)->conss) {
      if (c.name != r->cons) continue;
      if (r->count == 1) {
        auto& t = c.components[r->start - 1];
        t = TypeExpr::focus(std::move(t));
      } else {
        c.focus = CompRange{r->start, r->count};
      }
    }
  } else {
    const auto& n = std::get<TypeNameSel>(target);
    Decl* d = out.findType(n.type);
    if (!d) fail(ErrorCode::UnknownName, "no type " + n.type, {toString(n)});
    d->nameFocused = true;
  }
  return out;
}

std::vector<TypeSel> allSelectors(const Module& m) {
  std::vector<TypeSel> out;
  eachRoot(m, [&](const TypeSel& root, const TypeExpr& t) {
    preorder(root, t, [&](const TypeSel& s, const TypeExpr&) { out.push_back(s); });
  });
  return out;
}

TypePredicate TypePredicate::equals(TypeExpr t) {
  TypePredicate p;
  p.kind = Kind::EqualsType;
  p.type = stripFocus(std::move(t));
  return p;
}

TypePredicate TypePredicate::mentions(Name n) {
  TypePredicate p;
  p.kind = Kind::MentionsName;
  p.name = std::move(n);
  return p;
}

TypePredicate TypePredicate::topLevelIs(Shape s) {
  TypePredicate p;
  p.kind = Kind::TopLevelIs;
  p.shape = s;
  return p;
}

bool TypePredicate::operator()(const TypeExpr& t) const {
  const TypeExpr& u = unfocused(t);
  switch (kind) {
    case Kind::EqualsType: return stripFocus(u) == type;
    case Kind::MentionsName: return mentionsType(u, name);
    case Kind::TopLevelIs:
      switch (shape) {
        case Shape::Fun: return u.kind == TypeExpr::Kind::Fun;
        case Shape::Tuple: return u.kind == TypeExpr::Kind::Tuple;
        case Shape::List: return u.kind == TypeExpr::Kind::List;
        case Shape::App: return u.isApp();
        case Shape::Var: return u.kind == TypeExpr::Kind::Var;
      }
  }
  return false;
}

namespace {
constexpr std::pair<TypePredicate::Shape, std::string_view> kShapes[] = {
    {TypePredicate::Shape::Fun, "Fun"},   {TypePredicate::Shape::Tuple, "Tuple"},
    {TypePredicate::Shape::List, "List"}, {TypePredicate::Shape::App, "App"},
    {TypePredicate::Shape::Var, "Var"},
};
}  // namespace

TypePredicate parsePredicate(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos)
    fail(ErrorCode::BadArguments, "predicate needs a kind prefix: " + std::string(s));
  std::string_view kind = s.substr(0, colon), body = s.substr(colon + 1);
  if (kind == "equals") {
    try {
      return TypePredicate::equals(parseTypeFragment(body));
    } catch (const SyntaxError& e) {
      fail(ErrorCode::BadArguments, std::string("bad type in predicate: ") + e.what());
    }
  }
  if (kind == "mentions" && !body.empty())
    return TypePredicate::mentions(std::string(body));
  if (kind == "top")
    for (const auto& [shape, name] : kShapes)
      if (body == name) return TypePredicate::topLevelIs(shape);
  fail(ErrorCode::BadArguments, "bad predicate: " + std::string(s));
}

std::string toString(const TypePredicate& p) {
  switch (p.kind) {
    case TypePredicate::Kind::EqualsType: return "equals:" + printType(p.type);
    case TypePredicate::Kind::MentionsName: return "mentions:" + p.name;
    case TypePredicate::Kind::TopLevelIs:
      for (const auto& [shape, name] : kShapes)
        if (p.shape == shape) return "top:" + std::string(name);
  }
  return {};
}

std::vector<TypeSel> selectorsMatching(const Module& m, const TypePredicate& p) {
  std::vector<TypeSel> out;
  eachRoot(m, [&](const TypeSel& root, const TypeExpr& t) {
    preorder(root, t, [&](const TypeSel& s, const TypeExpr& u) {
      if (p(u)) out.push_back(s);
    });
  });
  return out;
}

std::vector<CompRangeSel> rangeOccurrences(const Module& m,
                                           const std::vector<TypeExpr>& run) {
  std::vector<CompRangeSel> out;
  if (run.empty()) return out;
  std::vector<TypeExpr> want;
  for (const auto& t : run) want.push_back(stripFocus(t));
  for (const auto& d : m.decls) {
    if (d.kind != Decl::Kind::Data && d.kind != Decl::Kind::Newtype) continue;
    for (const auto& c : d.conss) {
      for (std::size_t s = 0; s + want.size() <= c.components.size(); ++s) {
        bool ok = true;
        for (std::size_t k = 0; ok && k < want.size(); ++k)
          ok = stripFocus(c.components[s + k]) == want[k];
        if (ok) out.push_back({d.name, c.name, s + 1, want.size()});
      }
    }
  }
  return out;
}

}  // namespace dtr
