#include "dtr/evaluator.hpp"

#include <functional>
#include <map>
#include <memory>

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"

namespace dtr {

Value Value::con(Name c, std::vector<Value> args) {
  Value v;
  v.kind = Kind::Con;
  v.name = std::move(c);
  v.items = std::move(args);
  return v;
}

Value Value::tuple(std::vector<Value> es) {
  Value v;
  v.kind = Kind::Tuple;
  v.items = std::move(es);
  return v;
}

Value Value::list(std::vector<Value> es) {
  Value v;
  v.kind = Kind::List;
  v.items = std::move(es);
  return v;
}

Value Value::integer(long long n) {
  Value v;
  v.kind = Kind::Lit;
  v.lit.value = n;
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.kind = Kind::Lit;
  v.lit.value = std::move(s);
  return v;
}

namespace {

void printInto(const Value& v, std::string& out, bool nested) {
  auto seq = [&](const char* open, const char* close) {
    out += open;
    for (std::size_t i = 0; i < v.items.size(); ++i) {
      if (i) out += ", ";
      printInto(v.items[i], out, false);
    }
    out += close;
  };
  switch (v.kind) {
    case Value::Kind::Con:
      if (nested && !v.items.empty()) out += '(';
      out += v.name;
      for (const auto& a : v.items) {
        out += ' ';
        printInto(a, out, true);
      }
      if (nested && !v.items.empty()) out += ')';
      break;
    case Value::Kind::Tuple: seq("(", ")"); break;
    case Value::Kind::List: seq("[", "]"); break;
    case Value::Kind::Lit: {
      Expr e = Expr::literal(v.lit);
      std::string s = printExpr(e);
      bool neg = !v.lit.isString() && std::get<long long>(v.lit.value) < 0;
      out += nested && neg ? "(" + s + ")" : s;
      break;
    }
    case Value::Kind::Closure: out += "<" + v.name + ">"; break;
  }
}

}  // namespace

std::string printValue(const Value& v) {
  std::string out;
  printInto(v, out, false);
  return out;
}

namespace {

const std::map<Name, std::size_t>& builtins() {
  static const std::map<Name, std::size_t> b = {
      {"primAdd", 2}, {"primSub", 2},  {"primMul", 2},   {"primEq", 2},
      {"primLt", 2},  {"primMap", 2},  {"primFoldl", 3}, {"primFoldr", 3},
      {"primCons", 2}, {"primHead", 1}, {"primTail", 1},  {"primNull", 1},
  };
  return b;
}

struct Whnf;
using WPtr = std::shared_ptr<const Whnf>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

// An unevaluated expression in its environment, a suspended built-in
// computation, or a value.
struct Thunk {
  const Expr* expr = nullptr;
  Env env;
  std::shared_ptr<const std::function<WPtr()>> lazy;
  WPtr value;
};

struct EnvNode {
  Name name;
  Thunk th;
  Env next;
};

struct Whnf {
  enum class Kind { Con, Tuple, Nil, Cons, Lit, Lam, Fun, Prim };

  Kind kind = Kind::Con;
  Name name;                // Con, Fun, Prim
  std::vector<Thunk> args;  // Con/Tuple/Cons components, collected arguments
  Literal lit;
  const Expr* lam = nullptr;  // Lam
  Env env;                    // Lam
  std::size_t consumed = 0;   // Lam parameters already bound
};

WPtr make(Whnf w) { return std::make_shared<const Whnf>(std::move(w)); }

Thunk ready(WPtr v) {
  Thunk t;
  t.value = std::move(v);
  return t;
}

Thunk later(std::function<WPtr()> f) {
  Thunk t;
  t.lazy = std::make_shared<const std::function<WPtr()>>(std::move(f));
  return t;
}

WPtr boolean(bool b) {
  Whnf w;
  w.name = b ? "True" : "False";
  return make(std::move(w));
}

class Machine {
 public:
  Machine(const Module& m, std::size_t fuel) : m_(m), fuel_(fuel) {}

  Value run(const Expr& e) { return deep(eval(e, nullptr)); }

 private:
  void tick() {
    if (fuel_ == 0) fail(ErrorCode::FuelExhausted, "evaluation step budget exhausted");
    --fuel_;
  }

  WPtr force(const Thunk& t) {
    if (t.value) return t.value;
    if (t.lazy) return (*t.lazy)();
    return eval(*t.expr, t.env);
  }

  static Env bind(Env env, Name n, Thunk t) {
    return std::make_shared<const EnvNode>(EnvNode{std::move(n), std::move(t), std::move(env)});
  }

  static const Thunk* lookup(const Env& env, const Name& n) {
    for (const EnvNode* e = env.get(); e; e = e->next.get())
      if (e->name == n) return &e->th;
    return nullptr;
  }

  WPtr eval(const Expr& e, const Env& env) {
    tick();
    switch (e.kind) {
      case Expr::Kind::Var: {
        if (const Thunk* t = lookup(env, e.name)) return force(*t);
        if (const Decl* d = m_.findFun(e.name)) {
          if (d->equations.front().patterns.empty()) return call(*d, {});
          Whnf w;
          w.kind = Whnf::Kind::Fun;
          w.name = e.name;
          return make(std::move(w));
        }
        if (builtins().count(e.name)) {
          Whnf w;
          w.kind = Whnf::Kind::Prim;
          w.name = e.name;
          return make(std::move(w));
        }
        fail(ErrorCode::Unbound, "unbound variable " + e.name);
      }
      case Expr::Kind::Con: {
        Whnf w;
        w.name = e.name;
        return make(std::move(w));
      }
      case Expr::Kind::Lit: {
        Whnf w;
        w.kind = Whnf::Kind::Lit;
        w.lit = e.lit;
        return make(std::move(w));
      }
      case Expr::Kind::App: {
        std::vector<const Expr*> args;
        const Expr* h = &e;
        while (h->kind == Expr::Kind::App) {
          args.push_back(&h->kids[1]);
          h = &h->kids[0];
        }
        WPtr f = eval(*h, env);
        for (auto it = args.rbegin(); it != args.rend(); ++it)
          f = apply(f, Thunk{*it, env, nullptr, nullptr});
        return f;
      }
      case Expr::Kind::Lam: {
        Whnf w;
        w.kind = Whnf::Kind::Lam;
        w.lam = &e;
        w.env = env;
        return make(std::move(w));
      }
      case Expr::Kind::Case: {
        Thunk s{&e.kids[0], env, nullptr, nullptr};
        for (const auto& alt : e.alts) {
          Env inner = env;
          if (match(alt.pat, s, inner)) return eval(alt.rhs, inner);
        }
        fail(ErrorCode::PatternMatchFailure,
             "no alternative matches in " + printExpr(e));
      }
      case Expr::Kind::Tuple: {
        Whnf w;
        w.kind = Whnf::Kind::Tuple;
        for (const auto& k : e.kids) w.args.push_back(Thunk{&k, env, nullptr, nullptr});
        return make(std::move(w));
      }
      case Expr::Kind::List: {
        Whnf nil;
        nil.kind = Whnf::Kind::Nil;
        WPtr cur = make(std::move(nil));
        for (auto it = e.kids.rbegin(); it != e.kids.rend(); ++it) {
          Whnf c;
          c.kind = Whnf::Kind::Cons;
          c.args = {Thunk{&*it, env, nullptr, nullptr}, ready(cur)};
          cur = make(std::move(c));
        }
        return cur;
      }
      case Expr::Kind::Undefined:
        if (e.todo)
          fail(ErrorCode::HitBottom, "forced the to-do marker undefined #" + std::to_string(e.todo));
        fail(ErrorCode::HitBottom, "forced undefined");
    }
    fail(ErrorCode::IllFormed, "unknown expression");
  }

  WPtr apply(const WPtr& f, Thunk a) {
    Whnf w = *f;
    switch (f->kind) {
      case Whnf::Kind::Con:
        w.args.push_back(std::move(a));
        return make(std::move(w));
      case Whnf::Kind::Lam: {
        const auto& ps = f->lam->params;
        Env env = bind(f->env, ps[f->consumed], std::move(a));
        if (f->consumed + 1 == ps.size()) return eval(f->lam->kids[0], env);
        w.env = std::move(env);
        ++w.consumed;
        return make(std::move(w));
      }
      case Whnf::Kind::Fun: {
        w.args.push_back(std::move(a));
        const Decl* d = m_.findFun(f->name);
        if (w.args.size() == d->equations.front().patterns.size()) return call(*d, w.args);
        return make(std::move(w));
      }
      case Whnf::Kind::Prim:
        w.args.push_back(std::move(a));
        if (w.args.size() == builtins().at(w.name)) return prim(w.name, w.args);
        return make(std::move(w));
      default:
        fail(ErrorCode::PatternMatchFailure, "applied a value that is not a function");
    }
  }

  WPtr apply2(const WPtr& f, Thunk a, Thunk b) { return apply(apply(f, std::move(a)), std::move(b)); }

  WPtr call(const Decl& d, const std::vector<Thunk>& args) {
    tick();
    for (const auto& eq : d.equations) {
      Env env;
      bool ok = true;
      for (std::size_t i = 0; ok && i < args.size(); ++i) ok = match(eq.patterns[i], args[i], env);
      if (ok) return eval(eq.rhs, env);
    }
    fail(ErrorCode::PatternMatchFailure, "no equation of " + d.name + " matches");
  }

  bool match(const Pattern& p, const Thunk& t, Env& env) {
    switch (p.kind) {
      case Pattern::Kind::Wild: return true;
      case Pattern::Kind::Var: env = bind(env, p.name, t); return true;
      case Pattern::Kind::Lit: {
        WPtr v = force(t);
        return v->kind == Whnf::Kind::Lit && v->lit == p.lit;
      }
      case Pattern::Kind::Con: {
        WPtr v = force(t);
        if (v->kind != Whnf::Kind::Con || v->name != p.name || v->args.size() != p.args.size())
          return false;
        for (std::size_t i = 0; i < p.args.size(); ++i)
          if (!match(p.args[i], v->args[i], env)) return false;
        return true;
      }
      case Pattern::Kind::Tuple: {
        WPtr v = force(t);
        if (v->kind != Whnf::Kind::Tuple || v->args.size() != p.args.size()) return false;
        for (std::size_t i = 0; i < p.args.size(); ++i)
          if (!match(p.args[i], v->args[i], env)) return false;
        return true;
      }
    }
    return false;
  }

  long long integer(const Thunk& t, const Name& who) {
    WPtr v = force(t);
    if (v->kind != Whnf::Kind::Lit || v->lit.isString())
      fail(ErrorCode::PatternMatchFailure, who + " expects an Int");
    return std::get<long long>(v->lit.value);
  }

  WPtr cons(Thunk h, Thunk t) {
    Whnf c;
    c.kind = Whnf::Kind::Cons;
    c.args = {std::move(h), std::move(t)};
    return make(std::move(c));
  }

  WPtr list(const Thunk& t, const Name& who) {
    WPtr v = force(t);
    if (v->kind != Whnf::Kind::Nil && v->kind != Whnf::Kind::Cons)
      fail(ErrorCode::PatternMatchFailure, who + " expects a list");
    return v;
  }

  WPtr prim(const Name& n, const std::vector<Thunk>& a) {
    tick();
    auto num = [&](long long x) {
      Whnf w;
      w.kind = Whnf::Kind::Lit;
      w.lit.value = x;
      return make(std::move(w));
    };
    if (n == "primAdd") return num(integer(a[0], n) + integer(a[1], n));
    if (n == "primSub") return num(integer(a[0], n) - integer(a[1], n));
    if (n == "primMul") return num(integer(a[0], n) * integer(a[1], n));
    if (n == "primEq") return boolean(deep(force(a[0])) == deep(force(a[1])));
    if (n == "primLt") {
      WPtr x = force(a[0]), y = force(a[1]);
      if (x->kind != Whnf::Kind::Lit || y->kind != Whnf::Kind::Lit ||
          x->lit.isString() != y->lit.isString())
        fail(ErrorCode::PatternMatchFailure, "primLt compares two literals of one type");
      return boolean(x->lit.value < y->lit.value);
    }
    if (n == "primCons") return cons(a[0], a[1]);
    if (n == "primHead" || n == "primTail") {
      WPtr l = list(a[0], n);
      if (l->kind == Whnf::Kind::Nil) fail(ErrorCode::PatternMatchFailure, n + " of []");
      return force(l->args[n == "primHead" ? 0 : 1]);
    }
    if (n == "primNull") return boolean(list(a[0], n)->kind == Whnf::Kind::Nil);
    if (n == "primMap") {
      WPtr l = list(a[1], n);
      if (l->kind == Whnf::Kind::Nil) return l;
      Thunk f = a[0], h = l->args[0], t = l->args[1];
      return cons(later([this, f, h] { return apply(force(f), h); }),
                  later([this, f, t] { return prim("primMap", {f, t}); }));
    }
    if (n == "primFoldl") {
      Thunk acc = a[1];
      WPtr l = list(a[2], n);
      while (l->kind == Whnf::Kind::Cons) {
        Thunk f = a[0], h = l->args[0], prev = acc;
        acc = later([this, f, prev, h] { return apply2(force(f), prev, h); });
        l = list(l->args[1], n);
      }
      return force(acc);
    }
    if (n == "primFoldr") {
      WPtr l = list(a[2], n);
      if (l->kind == Whnf::Kind::Nil) return force(a[1]);
      Thunk f = a[0], z = a[1], t = l->args[1];
      return apply2(force(f), l->args[0],
                    later([this, f, z, t] { return prim("primFoldr", {f, z, t}); }));
    }
    fail(ErrorCode::Unbound, "unknown built-in " + n);
  }

  Value deep(const WPtr& w) {
    switch (w->kind) {
      case Whnf::Kind::Con: {
        Value v = Value::con(w->name);
        for (const auto& a : w->args) v.items.push_back(deep(force(a)));
        return v;
      }
      case Whnf::Kind::Tuple: {
        Value v = Value::tuple({});
        for (const auto& a : w->args) v.items.push_back(deep(force(a)));
        return v;
      }
      case Whnf::Kind::Nil:
      case Whnf::Kind::Cons: {
        Value v = Value::list({});
        WPtr cur = w;
        while (cur->kind == Whnf::Kind::Cons) {
          v.items.push_back(deep(force(cur->args[0])));
          cur = force(cur->args[1]);
        }
        return v;
      }
      case Whnf::Kind::Lit: {
        Value v;
        v.kind = Value::Kind::Lit;
        v.lit = w->lit;
        return v;
      }
      default: {
        Value v;
        v.kind = Value::Kind::Closure;
        v.name = w->kind == Whnf::Kind::Lam ? "function" : w->name;
        return v;
      }
    }
  }

  const Module& m_;
  std::size_t fuel_;
};

}  // namespace

bool isBuiltinFunction(const Name& n) { return builtins().count(n) > 0; }

Value eval(const Module& m, const Expr& e, std::size_t fuel) {
  Module stripped = stripFocus(m);
  Machine machine(stripped, fuel);
  return machine.run(e);
}

Value eval(const Module& m, std::string_view expr, std::size_t fuel) {
  return eval(m, parseExpr(expr), fuel);
}

}  // namespace dtr
