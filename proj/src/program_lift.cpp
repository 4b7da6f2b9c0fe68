#include "dtr/program_lift.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"
#include "dtr/focus.hpp"
#include "dtr/traversal.hpp"

namespace dtr {

// ---------------------------------------------------------------------------
// Names and substitution

Name FreshNames::next(const std::string& base) {
  unsigned& n = counters_[base];
  for (;;) {
    Name cand = base + std::to_string(++n);
    if (used_.insert(cand).second) return cand;
  }
}

namespace {

void freeVarsInto(const Expr& e, std::set<Name>& bound, std::set<Name>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      if (!bound.count(e.name)) out.insert(e.name);
      return;
    case Expr::Kind::Lam: {
      std::set<Name> inner = bound;
      inner.insert(e.params.begin(), e.params.end());
      freeVarsInto(e.kids[0], inner, out);
      return;
    }
    case Expr::Kind::Case: {
      freeVarsInto(e.kids[0], bound, out);
      for (const auto& alt : e.alts) {
        std::vector<Name> vs;
        patternVars(alt.pat, vs);
        std::set<Name> inner = bound;
        inner.insert(vs.begin(), vs.end());
        freeVarsInto(alt.rhs, inner, out);
      }
      return;
    }
    default:
      for (const auto& k : e.kids) freeVarsInto(k, bound, out);
  }
}

Pattern renamePatternVars(Pattern p, const std::map<Name, Name>& ren) {
  return everywhere(std::move(p), [&](Pattern q) {
    if (q.kind == Pattern::Kind::Var) {
      auto it = ren.find(q.name);
      if (it != ren.end()) q.name = it->second;
    }
    return q;
  });
}

// Renames binders that would capture a free variable of the replacements.
std::map<Name, Name> captureRenaming(const std::vector<Name>& binders, const Subst& s,
                                     FreshNames& fresh) {
  std::set<Name> danger;
  for (const auto& [v, r] : s) {
    auto fv = freeVars(r);
    danger.insert(fv.begin(), fv.end());
  }
  std::map<Name, Name> ren;
  for (const auto& b : binders)
    if (danger.count(b)) ren[b] = fresh.next(b);
  return ren;
}

Subst without(Subst s, const std::vector<Name>& names) {
  for (const auto& n : names) s.erase(n);
  return s;
}

}  // namespace

std::set<Name> freeVars(const Expr& e) {
  std::set<Name> bound, out;
  freeVarsInto(e, bound, out);
  return out;
}

Expr applyBeta(const Expr& f, std::vector<Expr> args, FreshNames& fresh) {
  if (args.empty()) return f;
  if (f.kind != Expr::Kind::Lam) return Expr::apply(f, std::move(args));
  std::size_t k = std::min(f.params.size(), args.size());
  Subst s;
  for (std::size_t i = 0; i < k; ++i) s[f.params[i]] = args[i];
  Expr body = f.kids[0];
  if (f.params.size() > k)
    body = Expr::lam({f.params.begin() + static_cast<long>(k), f.params.end()},
                     std::move(body));
  Expr r = substitute(body, s, fresh);
  return applyBeta(r, {args.begin() + static_cast<long>(k), args.end()}, fresh);
}

Expr substitute(const Expr& e, const Subst& s, FreshNames& fresh) {
  if (s.empty()) return e;
  switch (e.kind) {
    case Expr::Kind::Var: {
      auto it = s.find(e.name);
      return it == s.end() ? e : it->second;
    }
    case Expr::Kind::App: {
      Spine sp = spineOf(e);
      std::vector<Expr> args;
      for (const auto& a : sp.args) args.push_back(substitute(a, s, fresh));
      if (sp.head.kind == Expr::Kind::Var && s.count(sp.head.name))
        return applyBeta(s.at(sp.head.name), std::move(args), fresh);
      return Expr::apply(substitute(sp.head, s, fresh), std::move(args));
    }
    case Expr::Kind::Lam: {
      Subst inner = without(s, e.params);
      if (inner.empty()) return e;
      auto ren = captureRenaming(e.params, inner, fresh);
      Expr body = e.kids[0];
      std::vector<Name> ps = e.params;
      if (!ren.empty()) {
        Subst r;
        for (auto& p : ps)
          if (ren.count(p)) {
            r[p] = Expr::var(ren[p]);
            p = ren[p];
          }
        body = substitute(body, r, fresh);
      }
      return Expr::lam(std::move(ps), substitute(body, inner, fresh));
    }
    case Expr::Kind::Case: {
      Expr out = e;
      out.kids[0] = substitute(e.kids[0], s, fresh);
      for (auto& alt : out.alts) {
        std::vector<Name> vs;
        patternVars(alt.pat, vs);
        Subst inner = without(s, vs);
        if (inner.empty()) continue;
        auto ren = captureRenaming(vs, inner, fresh);
        if (!ren.empty()) {
          alt.pat = renamePatternVars(alt.pat, ren);
          Subst r;
          for (const auto& [from, to] : ren) r[from] = Expr::var(to);
          alt.rhs = substitute(alt.rhs, r, fresh);
        }
        alt.rhs = substitute(alt.rhs, inner, fresh);
      }
      return out;
    }
    default: {
      Expr out = e;
      for (auto& k : out.kids) k = substitute(k, s, fresh);
      return out;
    }
  }
}

namespace {

std::set<Name> globalNames(const Module& m) {
  std::set<Name> out;
  for (const auto& d : m.decls)
    if (d.kind == Decl::Kind::Fun || d.kind == Decl::Kind::Sig) out.insert(d.name);
  return out;
}

FreshNames freshFor(const Equation& eq, const std::set<Name>& globals) {
  std::set<Name> used = namesIn(eq);
  used.insert(globals.begin(), globals.end());
  return FreshNames(std::move(used));
}

std::size_t arityOf(const Module& m, const Name& cons) {
  auto c = m.findCons(cons);
  if (!c) fail(ErrorCode::UnknownName, "no constructor " + cons);
  return c->cons->components.size();
}

Expr contractPumped(Expr lam);

// Rewrites every pattern and expression site of one constructor. Expression
// sites are pumped to `arity` arguments first.
class SiteRewriter {
 public:
  using PatternRule = std::function<Pattern(Pattern, Subst&, FreshNames&)>;
  using ExprRule = std::function<Expr(std::vector<Expr>, FreshNames&)>;

  SiteRewriter(Name cons, std::size_t arity, PatternRule pat, ExprRule ex)
      : cons_(std::move(cons)), arity_(arity), pat_(std::move(pat)), ex_(std::move(ex)) {}

  Module run(const Module& m) {
    std::set<Name> globals = globalNames(m);
    return mapEquations(m, [&](Equation& eq) {
      FreshNames fresh = freshFor(eq, globals);
      Subst s;
      for (auto& p : eq.patterns) p = pattern(p, s, fresh);
      eq.rhs = substitute(expr(eq.rhs, fresh), s, fresh);
    });
  }

  Expr expr(const Expr& e, FreshNames& fresh) {
    switch (e.kind) {
      case Expr::Kind::Con:
      case Expr::Kind::App: {
        Spine sp = spineOf(e);
        if (sp.head.kind == Expr::Kind::Con && sp.head.name == cons_) {
          std::vector<Expr> args;
          for (const auto& a : sp.args) args.push_back(expr(a, fresh));
          std::vector<Name> pumped;
          while (args.size() < arity_) {
            pumped.push_back(fresh.next());
            args.push_back(Expr::var(pumped.back()));
          }
          std::vector<Expr> extra(args.begin() + static_cast<long>(arity_), args.end());
          args.resize(arity_);
          Expr r = Expr::apply(ex_(std::move(args), fresh), std::move(extra));
          if (pumped.empty()) return r;
          Expr lam = Expr::lam(std::move(pumped), std::move(r));
          lam.pumped = true;
          return lam;
        }
        if (e.kind == Expr::Kind::Con) return e;
        return Expr::app(expr(e.kids[0], fresh), expr(e.kids[1], fresh));
      }
      case Expr::Kind::Lam: {
        Expr out = e;
        out.kids[0] = expr(e.kids[0], fresh);
        return out.pumped ? contractPumped(std::move(out)) : out;
      }
      case Expr::Kind::Case: {
        Expr out = e;
        out.kids[0] = expr(e.kids[0], fresh);
        for (auto& alt : out.alts) {
          Subst s;
          alt.pat = pattern(alt.pat, s, fresh);
          alt.rhs = substitute(expr(alt.rhs, fresh), s, fresh);
        }
        return out;
      }
      default: {
        Expr out = e;
        for (auto& k : out.kids) k = expr(k, fresh);
        return out;
      }
    }
  }

  Pattern pattern(const Pattern& p, Subst& s, FreshNames& fresh) {
    Pattern out = p;
    for (auto& a : out.args) a = pattern(a, s, fresh);
    if (out.kind == Pattern::Kind::Con && out.name == cons_) {
      if (out.args.size() != arity_)
        fail(ErrorCode::ArityMismatch, "pattern " + cons_ + " is not saturated");
      return pat_(std::move(out), s, fresh);
    }
    return out;
  }

 private:
  Name cons_;
  std::size_t arity_;
  PatternRule pat_;
  ExprRule ex_;
};

// `\x1 .. xn -> C e1 .. ek x1 .. xn` is `C e1 .. ek` when the lambda came
// from pumping.
Expr contractPumped(Expr lam) {
  Spine sp = spineOf(lam.kids[0]);
  const auto& ps = lam.params;
  if (sp.head.kind != Expr::Kind::Con || sp.args.size() < ps.size()) return lam;
  std::size_t keep = sp.args.size() - ps.size();
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (sp.args[keep + i] != Expr::var(ps[i])) return lam;
  std::set<Name> bound(ps.begin(), ps.end());
  if (bound.size() != ps.size()) return lam;
  for (std::size_t i = 0; i < keep; ++i)
    for (const auto& v : freeVars(sp.args[i]))
      if (bound.count(v)) return lam;
  sp.args.resize(keep);
  return Expr::apply(sp.head, std::move(sp.args));
}

template <class T>
std::vector<T> permutedList(const std::vector<T>& xs, const Permutation& p) {
  std::vector<T> out;
  for (std::size_t j : p) out.push_back(xs[j - 1]);
  return out;
}

// `case e of { x -> x }` is `e`.
Expr dropTrivialCases(Expr e) {
  return everywhere(std::move(e), [](Expr x) {
    if (x.kind == Expr::Kind::Case && x.alts.size() == 1 &&
        x.alts[0].pat.kind == Pattern::Kind::Var &&
        x.alts[0].rhs.kind == Expr::Kind::Var &&
        x.alts[0].rhs.name == x.alts[0].pat.name)
      return x.kids[0];
    return x;
  });
}

}  // namespace

Expr etaPump(const Expr& e, const Name& cons, std::size_t arity) {
  std::set<Name> used;
  collectNames(e, used);
  FreshNames fresh(std::move(used));
  SiteRewriter rw(
      cons, arity, [](Pattern p, Subst&, FreshNames&) { return p; },
      [&](std::vector<Expr> args, FreshNames&) {
        return Expr::apply(Expr::con(cons), std::move(args));
      });
  return rw.expr(e, fresh);
}

Module liftRenameCons(const Module& m, const Name& oldName, const Name& newName) {
  Module out = mapPatterns(m, [&](Pattern p) {
    if (p.kind == Pattern::Kind::Con && p.name == oldName) p.name = newName;
    return p;
  });
  return mapEquations(std::move(out), [&](Equation& eq) {
    eq.rhs = everywhere(std::move(eq.rhs), [&](Expr e) {
      if (e.kind == Expr::Kind::Con && e.name == oldName) e.name = newName;
      return e;
    });
  });
}

Module liftPermuteComponents(const Module& m, const Name& cons, const Permutation& p) {
  SiteRewriter rw(
      cons, p.size(),
      [&](Pattern q, Subst&, FreshNames&) {
        q.args = permutedList(q.args, p);
        return q;
      },
      [&](std::vector<Expr> args, FreshNames&) {
        return Expr::apply(Expr::con(cons), permutedList(args, p));
      });
  return rw.run(m);
}

Module liftGroup(const Module& m, const CompRangeSel& r) {
  std::size_t arity = arityOf(m, r.cons) + r.count - 1;
  auto group = [&](auto xs, auto makeTuple) {
    auto first = xs.begin() + static_cast<long>(r.start - 1);
    auto last = first + static_cast<long>(r.count);
    decltype(xs) elems(first, last);
    xs.erase(first, last);
    xs.insert(xs.begin() + static_cast<long>(r.start - 1), makeTuple(std::move(elems)));
    return xs;
  };
  SiteRewriter rw(
      r.cons, arity,
      [&](Pattern q, Subst&, FreshNames&) {
        q.args = group(std::move(q.args), Pattern::tuple);
        return q;
      },
      [&](std::vector<Expr> args, FreshNames&) {
        return Expr::apply(Expr::con(r.cons), group(std::move(args), Expr::tuple));
      });
  return rw.run(m);
}

Module liftUngroup(const Module& m, const Name& cons, std::size_t index,
                   std::size_t width) {
  std::size_t arity = arityOf(m, cons) + 1 - width;
  std::size_t at = index - 1;
  SiteRewriter rw(
      cons, arity,
      [&](Pattern q, Subst& s, FreshNames& fresh) {
        Pattern p = q.args[at];
        std::vector<Pattern> parts;
        switch (p.kind) {
          case Pattern::Kind::Tuple: parts = p.args; break;
          case Pattern::Kind::Wild: parts.assign(width, Pattern::wild()); break;
          case Pattern::Kind::Var: {
            std::vector<Expr> es;
            for (std::size_t i = 0; i < width; ++i) {
              Name v = fresh.next(p.name + "_");
              parts.push_back(Pattern::var(v));
              es.push_back(Expr::var(v));
            }
            s[p.name] = Expr::tuple(std::move(es));
            break;
          }
          default:
            fail(ErrorCode::IllFormed, "pattern " + printPattern(p) + " cannot match a tuple");
        }
        if (parts.size() != width)
          fail(ErrorCode::IllFormed, "tuple pattern of the wrong width under " + cons);
        q.args.erase(q.args.begin() + static_cast<long>(at));
        q.args.insert(q.args.begin() + static_cast<long>(at), parts.begin(), parts.end());
        return q;
      },
      [&](std::vector<Expr> args, FreshNames&) {
        const Expr& a = args[at];
        if (a.kind != Expr::Kind::Tuple || a.kids.size() != width)
          fail(ErrorCode::UnsaturatedUntuplable,
               "argument " + printExpr(a) + " of " + cons + " is not a literal tuple");
        std::vector<Expr> parts = a.kids;
        args.erase(args.begin() + static_cast<long>(at));
        args.insert(args.begin() + static_cast<long>(at), parts.begin(), parts.end());
        return Expr::apply(Expr::con(cons), std::move(args));
      });
  return rw.run(m);
}

Module liftNewtype2Alias(const Module& m, const Name& cons) {
  SiteRewriter rw(
      cons, 1, [](Pattern q, Subst&, FreshNames&) { return q.args[0]; },
      [](std::vector<Expr> args, FreshNames&) { return args[0]; });
  return mapEquations(rw.run(m), [](Equation& eq) { eq.rhs = dropTrivialCases(eq.rhs); });
}

// ---------------------------------------------------------------------------
// Boundary conversions for alias2newtype and swapping

namespace {

struct Conv {
  enum class Kind { Id, Wrap, Unwrap, Call, Fun, Tuple };

  Kind kind = Kind::Id;
  Name name;     // constructor, or mediator for Call
  Name inverse;  // Call: the opposite mediator
  const DataUnifier* unifier = nullptr;
  std::vector<Conv> parts;  // Fun: {argument, result}; Tuple: elements

  bool isId() const { return kind == Kind::Id; }
};

std::vector<std::pair<Name, TypeExpr>> renameParams(const std::vector<Name>& from,
                                                    const std::vector<Name>& to) {
  std::vector<std::pair<Name, TypeExpr>> out;
  for (std::size_t i = 0; i < from.size() && i < to.size(); ++i)
    out.push_back({from[i], TypeExpr::var(to[i])});
  return out;
}

class Boundary {
 public:
  Boundary(const Module& before, const Module& after) : m0_(before), m1_(after) {}

  void newtypeMode(Name ty, Name cons) {
    ty_ = std::move(ty);
    ntCons_ = std::move(cons);
  }
  void unifierMode(const std::vector<DataUnifier>* us) { us_ = us; }

  Module run() {
    collectFunctions();
    collectConstructors();
    checkUnsigned();
    Module out = m1_;
    std::set<Name> globals = globalNames(m1_);
    if (us_)
      for (const auto& u : *us_) {
        globals.insert(toMediatorName(u.oldTy));
        globals.insert(fromMediatorName(u.oldTy));
      }
    for (auto& d : out.decls) {
      if (d.kind != Decl::Kind::Fun || !funs_.count(d.name)) continue;
      const FunInfo& info = funs_.at(d.name);
      for (auto& eq : d.equations) {
        FreshNames fresh = freshFor(eq, globals);
        Subst s;
        std::set<Name> bound;
        for (std::size_t i = 0; i < eq.patterns.size(); ++i) {
          std::vector<Name> vs;
          patternVars(eq.patterns[i], vs);
          bound.insert(vs.begin(), vs.end());
          if (info.typed)
            eq.patterns[i] = adapt(eq.patterns[i], &info.a1[i], &info.a0[i], s, fresh);
          else
            eq.patterns[i] = adapt(eq.patterns[i], nullptr, nullptr, s, fresh);
        }
        Expr rhs = substitute(rewrite(eq.rhs, bound, fresh), s, fresh);
        eq.rhs = cancel(apply(info.res, std::move(rhs), fresh));
      }
    }
    return out;
  }

  // Conversions meeting their inverse, as left behind when adapted pattern
  // variables flow into adapted calls: `fromT (toT e)` and `N (case e of
  // { N y -> y })` are `e`.
  Expr cancel(Expr e) const {
    std::map<Name, Name> inverse;
    if (us_)
      for (const auto& u : *us_) {
        inverse[toMediatorName(u.oldTy)] = fromMediatorName(u.oldTy);
        inverse[fromMediatorName(u.oldTy)] = toMediatorName(u.oldTy);
      }
    auto unwrapped = [&](const Expr& x) -> const Expr* {
      if (x.kind == Expr::Kind::Case && x.alts.size() == 1 &&
          x.alts[0].pat.kind == Pattern::Kind::Con && x.alts[0].pat.name == ntCons_ &&
          x.alts[0].pat.args.size() == 1 && x.alts[0].pat.args[0].kind == Pattern::Kind::Var &&
          x.alts[0].rhs == Expr::var(x.alts[0].pat.args[0].name))
        return &x.kids[0];
      return nullptr;
    };
    return everywhere(std::move(e), [&](Expr x) {
      if (x.kind != Expr::Kind::App) return x;
      const Expr& f = x.kids[0];
      const Expr& a = x.kids[1];
      if (f.kind == Expr::Kind::Var && a.kind == Expr::Kind::App &&
          a.kids[0].kind == Expr::Kind::Var) {
        auto it = inverse.find(f.name);
        if (it != inverse.end() && it->second == a.kids[0].name) return a.kids[1];
      }
      if (!ntCons_.empty() && f.kind == Expr::Kind::Con && f.name == ntCons_)
        if (const Expr* inner = unwrapped(a)) return *inner;
      return x;
    });
  }

  Module mediators(Module out) {
    for (const auto& u : *us_) {
      const Decl* o = m0_.findType(u.oldTy);
      const Decl* n = m1_.findType(u.newTy);
      std::vector<TypeExpr> ps;
      for (const auto& p : o->params) ps.push_back(TypeExpr::var(p));
      TypeExpr oldT = TypeExpr::app(u.oldTy, ps), newT = TypeExpr::app(u.newTy, ps);
      for (bool toOld : {true, false}) {
        Name fname = toOld ? toMediatorName(u.oldTy) : fromMediatorName(u.oldTy);
        TypeExpr sig = toOld ? TypeExpr::fun(newT, oldT) : TypeExpr::fun(oldT, newT);
        if (const Decl* existing = out.findSig(fname)) {
          if (alphaEqTypes(existing->type, sig)) continue;
          fail(ErrorCode::NameClash, "function " + fname + " already exists");
        }
        if (out.findFun(fname))
          fail(ErrorCode::NameClash, "function " + fname + " already exists");
        Decl sd;
        sd.kind = Decl::Kind::Sig;
        sd.name = fname;
        sd.type = sig;
        Decl fd;
        fd.kind = Decl::Kind::Fun;
        fd.name = fname;
        for (const auto& [oc, nc] : u.consPairs) {
          const ConsDecl* ocd = m0_.findCons(oc)->cons;
          const ConsDecl* ncd = m1_.findCons(nc)->cons;
          FreshNames fresh(globalNames(out));
          std::vector<Pattern> pats;
          std::vector<Expr> args;
          for (std::size_t j = 0; j < ocd->components.size(); ++j) {
            Name v = fresh.next();
            pats.push_back(Pattern::var(v));
            TypeExpr c0 = stripFocus(ocd->components[j]);
            TypeExpr c1 = substType(stripFocus(ncd->components[j]),
                                    renameParams(n->params, o->params));
            Conv c = toOld ? conv(c1, c0, false) : conv(c0, c1, true);
            args.push_back(apply(c, Expr::var(v), fresh));
          }
          Equation eq;
          eq.fun = fname;
          eq.patterns = {Pattern::con(toOld ? nc : oc, std::move(pats))};
          eq.rhs = Expr::apply(Expr::con(toOld ? oc : nc), std::move(args));
          fd.equations.push_back(std::move(eq));
        }
        out.decls.push_back(std::move(sd));
        out.decls.push_back(std::move(fd));
      }
    }
    return out;
  }

 private:
  struct FunInfo {
    bool typed = false;
    std::vector<TypeExpr> a0, a1;
    std::vector<Conv> callArg;  // old -> new, at call sites
    Conv callRes;               // new -> old, at call sites
    Conv res;                   // old -> new, on right-hand sides
    bool changed = false;
  };
  struct ConsInfo {
    std::vector<TypeExpr> c0, c1;
    std::vector<Conv> up;
    bool changed = false;
  };

  const Module& from(bool up) const { return up ? m0_ : m1_; }
  const Module& to(bool up) const { return up ? m1_ : m0_; }

  // Head expansion that keeps the alias being turned into a newtype.
  TypeExpr expandStop(const Module& m, const TypeExpr& t) const {
    TypeExpr cur = stripFocus(t);
    for (int guard = 0; guard < 1000 && cur.isApp() && cur.name != ty_; ++guard) {
      const Decl* d = m.findType(cur.name);
      if (!d || d->kind != Decl::Kind::Alias || d->params.size() != cur.args.size())
        break;
      std::vector<std::pair<Name, TypeExpr>> sub;
      for (std::size_t i = 0; i < d->params.size(); ++i)
        sub.push_back({d->params[i], cur.args[i]});
      cur = substType(stripFocus(d->type), sub);
    }
    return cur;
  }

  [[noreturn]] void nested(const TypeExpr& a, const TypeExpr& b) const {
    fail(ErrorCode::NestedOccurrenceUnsupported,
         "no conversion between " + printType(a) + " and " + printType(b) +
             " at a nested position");
  }

  std::optional<Conv> nominal(const TypeExpr& a, const TypeExpr& b, bool up) const {
    if (!a.isApp() || !b.isApp()) return std::nullopt;
    auto sameArgs = [&] {
      if (a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (expandFull(from(up), a.args[i]) != expandFull(to(up), b.args[i])) return false;
      return true;
    };
    if (!ty_.empty() && a.name == ty_ && b.name == ty_) {
      if (!sameArgs()) nested(a, b);
      Conv c;
      c.kind = up ? Conv::Kind::Wrap : Conv::Kind::Unwrap;
      c.name = ntCons_;
      return c;
    }
    if (us_)
      for (const auto& u : *us_) {
        bool hit = up ? (a.name == u.oldTy && b.name == u.newTy)
                      : (a.name == u.newTy && b.name == u.oldTy);
        if (!hit) continue;
        if (!sameArgs()) nested(a, b);
        Conv c;
        c.kind = Conv::Kind::Call;
        c.name = up ? fromMediatorName(u.oldTy) : toMediatorName(u.oldTy);
        c.inverse = up ? toMediatorName(u.oldTy) : fromMediatorName(u.oldTy);
        c.unifier = &u;
        return c;
      }
    return std::nullopt;
  }

 public:
  /// Conversion from `a` (in the module on the `from` side) to `b`.
  Conv conv(const TypeExpr& a0, const TypeExpr& b0, bool up) const {
    if (expandFull(from(up), a0) == expandFull(to(up), b0)) return {};
    if (auto c = nominal(stripFocus(a0), stripFocus(b0), up)) return *c;
    TypeExpr a = expandStop(from(up), a0), b = expandStop(to(up), b0);
    if (auto c = nominal(a, b, up)) return *c;
    Conv c;
    if (a.kind == TypeExpr::Kind::Fun && b.kind == TypeExpr::Kind::Fun) {
      c.kind = Conv::Kind::Fun;
      c.parts = {conv(b.args[0], a.args[0], !up), conv(a.args[1], b.args[1], up)};
      return c;
    }
    if (a.kind == TypeExpr::Kind::Tuple && b.kind == TypeExpr::Kind::Tuple &&
        a.args.size() == b.args.size()) {
      c.kind = Conv::Kind::Tuple;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        c.parts.push_back(conv(a.args[i], b.args[i], up));
      return c;
    }
    nested(a0, b0);
  }

  Expr apply(const Conv& c, Expr e, FreshNames& fresh) const {
    switch (c.kind) {
      case Conv::Kind::Id: return e;
      case Conv::Kind::Wrap:
        if (e.kind == Expr::Kind::Case && e.alts.size() == 1 &&
            e.alts[0].pat.kind == Pattern::Kind::Con && e.alts[0].pat.name == c.name &&
            e.alts[0].pat.args.size() == 1 &&
            e.alts[0].pat.args[0].kind == Pattern::Kind::Var &&
            e.alts[0].rhs == Expr::var(e.alts[0].pat.args[0].name))
          return e.kids[0];
        return Expr::app(Expr::con(c.name), std::move(e));
      case Conv::Kind::Unwrap: {
        Spine sp = spineOf(e);
        if (sp.head.kind == Expr::Kind::Con && sp.head.name == c.name && sp.args.size() == 1)
          return sp.args[0];
        Name y = fresh.next();
        return Expr::caseOf(std::move(e),
                            {Alt{Pattern::con(c.name, {Pattern::var(y)}), Expr::var(y)}});
      }
      case Conv::Kind::Call: {
        Spine sp = spineOf(e);
        if (sp.head.kind == Expr::Kind::Var && sp.head.name == c.inverse &&
            sp.args.size() == 1)
          return sp.args[0];
        return Expr::app(Expr::var(c.name), std::move(e));
      }
      case Conv::Kind::Fun: {
        if (e.kind == Expr::Kind::Lam && c.parts[0].isId()) {
          std::vector<Name> ps = e.params;
          Expr body = e.kids[0];
          if (ps.size() > 1) body = Expr::lam({ps.begin() + 1, ps.end()}, std::move(body));
          return flatLam(ps[0], apply(c.parts[1], std::move(body), fresh));
        }
        Name x = fresh.next();
        Expr inner = applyBeta(e, {apply(c.parts[0], Expr::var(x), fresh)}, fresh);
        Expr nb = apply(c.parts[1], std::move(inner), fresh);
        if (nb.kind == Expr::Kind::App && nb.kids[1] == Expr::var(x) &&
            !freeVars(nb.kids[0]).count(x))
          return nb.kids[0];
        return flatLam(x, std::move(nb));
      }
      case Conv::Kind::Tuple: {
        if (e.kind == Expr::Kind::Tuple) {
          for (std::size_t i = 0; i < e.kids.size(); ++i)
            e.kids[i] = apply(c.parts[i], std::move(e.kids[i]), fresh);
          return e;
        }
        std::vector<Pattern> ps;
        std::vector<Expr> es;
        for (const auto& part : c.parts) {
          Name v = fresh.next();
          ps.push_back(Pattern::var(v));
          es.push_back(apply(part, Expr::var(v), fresh));
        }
        return Expr::caseOf(std::move(e),
                            {Alt{Pattern::tuple(std::move(ps)), Expr::tuple(std::move(es))}});
      }
    }
    return e;
  }

 private:
  static Expr flatLam(Name p, Expr body) {
    if (body.kind == Expr::Kind::Lam) {
      body.params.insert(body.params.begin(), std::move(p));
      return body;
    }
    return Expr::lam({std::move(p)}, std::move(body));
  }

  static bool peel(const Boundary& b, const Module& m, TypeExpr t, std::size_t n,
                   std::vector<TypeExpr>& args, TypeExpr& res) {
    t = stripFocus(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (t.kind != TypeExpr::Kind::Fun) t = b.expandStop(m, t);
      if (t.kind != TypeExpr::Kind::Fun) return false;
      args.push_back(t.args[0]);
      TypeExpr rest = t.args[1];
      t = std::move(rest);
    }
    res = t;
    return true;
  }

  void collectFunctions() {
    for (const auto& d : m1_.decls) {
      if (d.kind != Decl::Kind::Fun) continue;
      const Decl* s1 = m1_.findSig(d.name);
      const Decl* s0 = m0_.findSig(d.name);
      if (!s1 || !s0) continue;
      FunInfo info;
      std::size_t n = d.equations.front().patterns.size();
      TypeExpr r0, r1;
      bool ok = peel(*this, m0_, s0->type, n, info.a0, r0) &&
                peel(*this, m1_, s1->type, n, info.a1, r1);
      if (!ok) {
        if (expandFull(m0_, s0->type) != expandFull(m1_, s1->type))
          fail(ErrorCode::NestedOccurrenceUnsupported,
               "the arguments of " + d.name + " cannot be adapted", {"sig:" + d.name + "/type"});
        info.a0.clear();
        info.a1.clear();
        funs_[d.name] = std::move(info);
        continue;
      }
      info.typed = true;
      for (std::size_t i = 0; i < n; ++i) {
        info.callArg.push_back(conv(info.a0[i], info.a1[i], true));
        info.changed = info.changed || !info.callArg.back().isId();
      }
      info.callRes = conv(r1, r0, false);
      info.res = conv(r0, r1, true);
      info.changed = info.changed || !info.res.isId();
      funs_[d.name] = std::move(info);
    }
  }

  void collectConstructors() {
    for (const auto& d : m1_.decls) {
      if (d.kind != Decl::Kind::Data && d.kind != Decl::Kind::Newtype) continue;
      for (const auto& c : d.conss) {
        auto old = m0_.findCons(c.name);
        if (!old || old->cons->components.size() != c.components.size()) continue;
        ConsInfo info;
        for (std::size_t i = 0; i < c.components.size(); ++i) {
          info.c0.push_back(stripFocus(old->cons->components[i]));
          info.c1.push_back(stripFocus(c.components[i]));
          info.up.push_back(conv(info.c0.back(), info.c1.back(), true));
          info.changed = info.changed || !info.up.back().isId();
        }
        if (info.changed) cons_[c.name] = std::move(info);
      }
    }
  }

  bool touchesChanged(const Pattern& p) const {
    if (p.kind == Pattern::Kind::Con && cons_.count(p.name)) return true;
    return std::any_of(p.args.begin(), p.args.end(),
                       [&](const Pattern& a) { return touchesChanged(a); });
  }

  bool touchesChanged(const Expr& e) const {
    if (e.kind == Expr::Kind::Var && funs_.count(e.name) && funs_.at(e.name).changed)
      return true;
    if (e.kind == Expr::Kind::Con && cons_.count(e.name)) return true;
    for (const auto& k : e.kids)
      if (touchesChanged(k)) return true;
    for (const auto& alt : e.alts)
      if (touchesChanged(alt.pat) || touchesChanged(alt.rhs)) return true;
    return false;
  }

  void checkUnsigned() const {
    for (const auto& d : m1_.decls) {
      if (d.kind != Decl::Kind::Fun || m1_.findSig(d.name)) continue;
      for (std::size_t i = 0; i < d.equations.size(); ++i) {
        const Equation& eq = d.equations[i];
        bool hit = touchesChanged(eq.rhs);
        for (const auto& p : eq.patterns) hit = hit || touchesChanged(p);
        if (hit)
          fail(ErrorCode::UnsignedFunctionUsesType,
               d.name + " has no signature but uses an affected function or constructor",
               {d.name + "/" + std::to_string(i + 1)});
      }
    }
  }

  // Adapts an old-code pattern to a value of the new type `t1` that the old
  // code expects at type `t0`.
  Pattern adapt(const Pattern& p, const TypeExpr* t1, const TypeExpr* t0, Subst& s,
                FreshNames& fresh) const {
    Conv c = t1 && t0 ? conv(*t1, *t0, false) : Conv{};
    if (!c.isId()) {
      if (p.kind == Pattern::Kind::Wild) return p;
      if (p.kind == Pattern::Kind::Var) {
        s[p.name] = apply(c, Expr::var(p.name), fresh);
        return p;
      }
      if (c.kind == Conv::Kind::Unwrap)
        return Pattern::con(c.name, {adapt(p, nullptr, nullptr, s, fresh)});
      if (c.kind == Conv::Kind::Call && p.kind == Pattern::Kind::Con) {
        const DataUnifier& u = *c.unifier;
        auto pair = std::find_if(u.consPairs.begin(), u.consPairs.end(),
                                 [&](const auto& cp) { return cp.first == p.name; });
        if (pair == u.consPairs.end()) nested(*t1, *t0);
        const ConsDecl* ocd = m0_.findCons(pair->first)->cons;
        auto nref = *m1_.findCons(pair->second);
        auto sub = renameParams(nref.type->params, m0_.findType(u.oldTy)->params);
        Pattern out = Pattern::con(pair->second);
        for (std::size_t j = 0; j < p.args.size(); ++j) {
          TypeExpr c1 = substType(stripFocus(nref.cons->components[j]), sub);
          TypeExpr c0 = stripFocus(ocd->components[j]);
          out.args.push_back(adapt(p.args[j], &c1, &c0, s, fresh));
        }
        return out;
      }
      if (c.kind == Conv::Kind::Tuple && p.kind == Pattern::Kind::Tuple) {
        TypeExpr a = expandStop(m1_, *t1), b = expandStop(m0_, *t0);
        Pattern out = p;
        for (std::size_t j = 0; j < p.args.size(); ++j)
          out.args[j] = adapt(p.args[j], &a.args[j], &b.args[j], s, fresh);
        return out;
      }
      nested(*t1, *t0);
    }
    Pattern out = p;
    if (p.kind == Pattern::Kind::Con) {
      auto it = cons_.find(p.name);
      for (std::size_t j = 0; j < p.args.size(); ++j)
        out.args[j] = it == cons_.end()
                          ? adapt(p.args[j], nullptr, nullptr, s, fresh)
                          : adapt(p.args[j], &it->second.c1[j], &it->second.c0[j], s, fresh);
    } else if (p.kind == Pattern::Kind::Tuple) {
      std::optional<TypeExpr> a, b;
      if (t1 && t0) {
        a = expandStop(m1_, *t1);
        b = expandStop(m0_, *t0);
        if (a->kind != TypeExpr::Kind::Tuple || b->kind != TypeExpr::Kind::Tuple ||
            a->args.size() != p.args.size() || b->args.size() != p.args.size())
          a.reset();
      }
      for (std::size_t j = 0; j < p.args.size(); ++j)
        out.args[j] = a ? adapt(p.args[j], &a->args[j], &b->args[j], s, fresh)
                        : adapt(p.args[j], nullptr, nullptr, s, fresh);
    }
    return out;
  }

  // Adapts call sites of changed functions and constructor sites in old code.
  Expr rewrite(const Expr& e, const std::set<Name>& bound, FreshNames& fresh) const {
    switch (e.kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Con:
      case Expr::Kind::App: {
        Spine sp = spineOf(e);
        std::vector<Expr> args;
        for (const auto& a : sp.args) args.push_back(rewrite(a, bound, fresh));
        const Expr& h = sp.head;
        const FunInfo* fi = nullptr;
        const ConsInfo* ci = nullptr;
        if (h.kind == Expr::Kind::Var && !bound.count(h.name)) {
          auto it = funs_.find(h.name);
          if (it != funs_.end() && it->second.changed) fi = &it->second;
        }
        if (h.kind == Expr::Kind::Con) {
          auto it = cons_.find(h.name);
          if (it != cons_.end()) ci = &it->second;
        }
        if (!fi && !ci) {
          Expr head = (h.kind == Expr::Kind::Var || h.kind == Expr::Kind::Con)
                          ? h
                          : rewrite(h, bound, fresh);
          return Expr::apply(std::move(head), std::move(args));
        }
        std::size_t n = fi ? fi->callArg.size() : ci->up.size();
        std::vector<Name> pumped;
        while (args.size() < n) {
          pumped.push_back(fresh.next());
          args.push_back(Expr::var(pumped.back()));
        }
        std::vector<Expr> core;
        for (std::size_t i = 0; i < n; ++i)
          core.push_back(apply(fi ? fi->callArg[i] : ci->up[i], args[i], fresh));
        Expr r = Expr::apply(h, std::move(core));
        if (fi) r = apply(fi->callRes, std::move(r), fresh);
        r = Expr::apply(std::move(r), {args.begin() + static_cast<long>(n), args.end()});
        if (pumped.empty()) return r;
        Expr lam = Expr::lam(std::move(pumped), std::move(r));
        lam.pumped = true;
        return lam;
      }
      case Expr::Kind::Lam: {
        std::set<Name> inner = bound;
        inner.insert(e.params.begin(), e.params.end());
        Expr out = e;
        out.kids[0] = rewrite(e.kids[0], inner, fresh);
        return out.pumped ? contractPumped(std::move(out)) : out;
      }
      case Expr::Kind::Case: {
        Expr out = e;
        out.kids[0] = rewrite(e.kids[0], bound, fresh);
        for (auto& alt : out.alts) {
          Subst s;
          std::vector<Name> vs;
          patternVars(alt.pat, vs);
          std::set<Name> inner = bound;
          inner.insert(vs.begin(), vs.end());
          alt.pat = adapt(alt.pat, nullptr, nullptr, s, fresh);
          alt.rhs = substitute(rewrite(alt.rhs, inner, fresh), s, fresh);
        }
        return out;
      }
      default: {
        Expr out = e;
        for (auto& k : out.kids) k = rewrite(k, bound, fresh);
        return out;
      }
    }
  }

  const Module& m0_;
  const Module& m1_;
  Name ty_, ntCons_;
  const std::vector<DataUnifier>* us_ = nullptr;
  std::map<Name, FunInfo> funs_;
  std::map<Name, ConsInfo> cons_;
};

}  // namespace

Module liftAlias2Newtype(const Module& before, const Module& after, const Name& ty,
                         const Name& cons) {
  Boundary b(before, after);
  b.newtypeMode(ty, cons);
  return b.run();
}

std::string toMediatorName(const Name& oldTy) { return "to" + oldTy; }
std::string fromMediatorName(const Name& oldTy) { return "from" + oldTy; }

Module generateMediators(const Module& before, const Module& after,
                         const std::vector<DataUnifier>& us) {
  Boundary b(before, after);
  b.unifierMode(&us);
  return b.mediators(after);
}

Module liftSwap(const Module& before, const Module& after,
                const std::vector<DataUnifier>& us) {
  Boundary b(before, after);
  b.unifierMode(&us);
  return b.mediators(b.run());
}

// ---------------------------------------------------------------------------
// Inclusion, exclusion, insertion, deletion

Module liftInclude(const Module& before, const Module& m, const Name& ty,
                   const Name& cons, unsigned tag) {
  std::set<Name> tyCons;
  for (const auto& c : constructorsOf(before, ty)) tyCons.insert(c.name);
  std::size_t arity = arityOf(m, cons);
  auto discriminates = [&](const Pattern& p) {
    return p.kind == Pattern::Kind::Con && tyCons.count(p.name);
  };
  Pattern newPat = Pattern::con(cons, std::vector<Pattern>(arity, Pattern::wild()));
  Module out = m;
  for (auto& d : out.decls) {
    if (d.kind != Decl::Kind::Fun) continue;
    for (auto& eq : d.equations)
      eq.rhs = everywhere(std::move(eq.rhs), [&](Expr e) {
        if (e.kind == Expr::Kind::Case &&
            std::any_of(e.alts.begin(), e.alts.end(),
                        [&](const Alt& a) { return discriminates(a.pat); }))
          e.alts.push_back(Alt{newPat, Expr::undefined(tag)});
        return e;
      });
    std::size_t n = d.equations.front().patterns.size();
    for (std::size_t j = 0; j < n; ++j) {
      bool found = std::any_of(d.equations.begin(), d.equations.end(),
                               [&](const Equation& eq) { return discriminates(eq.patterns[j]); });
      if (!found) continue;
      Equation eq;
      eq.fun = d.name;
      eq.patterns.assign(n, Pattern::wild());
      eq.patterns[j] = newPat;
      eq.rhs = Expr::undefined(tag);
      d.equations.push_back(std::move(eq));
      break;
    }
  }
  return out;
}

Module liftExclude(const Module& before, const Module& m, const Name& cons,
                   unsigned tag) {
  (void)before;
  std::function<Expr(const Expr&)> rw = [&](const Expr& e) -> Expr {
    Spine sp = spineOf(e);
    if (sp.head.kind == Expr::Kind::Con && sp.head.name == cons) return Expr::undefined(tag);
    Expr out = e;
    for (auto& k : out.kids) k = rw(k);
    if (out.kind == Expr::Kind::Case) {
      std::erase_if(out.alts, [&](const Alt& a) { return patternMentionsCons(a.pat, cons); });
      for (auto& a : out.alts) a.rhs = rw(a.rhs);
      if (out.alts.empty()) return Expr::undefined(tag);
    }
    return out;
  };
  Module out = m;
  for (auto& d : out.decls) {
    if (d.kind != Decl::Kind::Fun) continue;
    std::erase_if(d.equations, [&](const Equation& eq) {
      return std::any_of(eq.patterns.begin(), eq.patterns.end(),
                         [&](const Pattern& p) { return patternMentionsCons(p, cons); });
    });
    if (d.equations.empty())
      fail(ErrorCode::WouldEmptyFunction,
           d.name + " would lose all of its equations", {d.name});
    for (auto& eq : d.equations) eq.rhs = rw(eq.rhs);
  }
  return out;
}

Module liftInsert(const Module& before, const Module& m, const Name& cons,
                  std::size_t i, unsigned tag) {
  SiteRewriter rw(
      cons, arityOf(before, cons),
      [&](Pattern q, Subst&, FreshNames&) {
        q.args.insert(q.args.begin() + static_cast<long>(i - 1), Pattern::wild());
        return q;
      },
      [&](std::vector<Expr> args, FreshNames&) {
        args.insert(args.begin() + static_cast<long>(i - 1), Expr::undefined(tag));
        return Expr::apply(Expr::con(cons), std::move(args));
      });
  return rw.run(m);
}

Module liftDelete(const Module& before, const Module& m, const Name& cons,
                  std::size_t i, unsigned tag) {
  SiteRewriter rw(
      cons, arityOf(before, cons),
      [&](Pattern q, Subst& s, FreshNames&) {
        std::vector<Name> vs;
        patternVars(q.args[i - 1], vs);
        for (const auto& v : vs) s[v] = Expr::undefined(tag);
        q.args.erase(q.args.begin() + static_cast<long>(i - 1));
        return q;
      },
      [&](std::vector<Expr> args, FreshNames&) {
        args.erase(args.begin() + static_cast<long>(i - 1));
        return Expr::apply(Expr::con(cons), std::move(args));
      });
  return rw.run(m);
}

// ---------------------------------------------------------------------------
// Elimination check and to-do markers

std::vector<std::string> checkEliminate(const Module& m, const std::vector<Name>& names) {
  std::set<Name> gone(names.begin(), names.end());
  std::vector<std::string> out;
  for (const auto& sel : allSelectors(m)) {
    if (!sel.path.empty()) continue;
    if (sel.kind != TypeSel::Kind::SigType && gone.count(sel.owner)) continue;
    TypeExpr t = resolve(m, sel);
    if (std::any_of(names.begin(), names.end(),
                    [&](const Name& n) { return mentionsType(t, n); }))
      out.push_back(toString(sel));
  }
  std::vector<Name> conss;
  for (const auto& n : names)
    if (const Decl* d = m.findType(n))
      for (const auto& c : d->conss) conss.push_back(c.name);
  for (const auto& d : m.decls) {
    if (d.kind != Decl::Kind::Fun) continue;
    for (std::size_t i = 0; i < d.equations.size(); ++i) {
      const Equation& eq = d.equations[i];
      bool uses = false;
      for (const auto& c : conss) {
        for (const auto& p : eq.patterns) uses = uses || patternMentionsCons(p, c);
        uses = uses || exprMentionsCons(eq.rhs, c);
      }
      if (uses) out.push_back(d.name + "/" + std::to_string(i + 1));
    }
  }
  return out;
}

namespace {

template <class F>
void walkExpr(const Expr& e, Path& path, F&& f) {
  f(e, path);
  auto kid = [&](const Expr& k, std::size_t step) {
    path.push_back(step);
    walkExpr(k, path, f);
    path.pop_back();
  };
  switch (e.kind) {
    case Expr::Kind::Case:
      kid(e.kids[0], 1);
      for (std::size_t i = 0; i < e.alts.size(); ++i) kid(e.alts[i].rhs, i + 2);
      break;
    default:
      for (std::size_t i = 0; i < e.kids.size(); ++i) kid(e.kids[i], i + 1);
  }
}

}  // namespace

std::vector<TodoMarker> todoMarkers(const Module& m) {
  std::vector<TodoMarker> out;
  for (const auto& d : m.decls) {
    if (d.kind != Decl::Kind::Fun) continue;
    for (std::size_t i = 0; i < d.equations.size(); ++i) {
      Path path;
      walkExpr(d.equations[i].rhs, path, [&](const Expr& e, const Path& p) {
        if (e.kind == Expr::Kind::Undefined && e.todo)
          out.push_back(TodoMarker{d.name, i + 1, p});
      });
    }
  }
  return out;
}

std::vector<TodoMarker> todoMarkers(const Module& m, unsigned tag) {
  std::vector<TodoMarker> out;
  for (const auto& t : todoMarkers(m))
    if (resolveTodo(m, t).todo == tag) out.push_back(t);
  return out;
}

unsigned nextTodoTag(const Module& m) {
  unsigned top = 0;
  for (const auto& t : todoMarkers(m)) top = std::max(top, resolveTodo(m, t).todo);
  return top + 1;
}

const Expr& resolveTodo(const Module& m, const TodoMarker& t) {
  const Decl* d = m.findFun(t.fun);
  if (!d || t.equation < 1 || t.equation > d->equations.size())
    fail(ErrorCode::BadPath, "no equation " + toString(t));
  const Expr* e = &d->equations[t.equation - 1].rhs;
  for (std::size_t step : t.path) {
    if (e->kind == Expr::Kind::Case) {
      if (step == 1) {
        e = &e->kids[0];
        continue;
      }
      if (step < 2 || step - 2 >= e->alts.size())
        fail(ErrorCode::BadPath, "no subexpression " + toString(t));
      e = &e->alts[step - 2].rhs;
      continue;
    }
    if (step < 1 || step > e->kids.size())
      fail(ErrorCode::BadPath, "no subexpression " + toString(t));
    e = &e->kids[step - 1];
  }
  return *e;
}

}  // namespace dtr
