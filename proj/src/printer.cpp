#include <optional>

#include "dtr/concrete.hpp"
#include "dtr/selector.hpp"

namespace dtr {
namespace {

enum class TyCtx { Top, FunLeft, Arg, Component };
enum class ExCtx { Top, Head, Arg };

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string literal(const Literal& l) {
  if (l.isString()) return quote(std::get<std::string>(l.value));
  return std::to_string(std::get<long long>(l.value));
}

class Printer {
 public:
  explicit Printer(std::vector<Span>* spans) : spans_(spans) {}

  std::string take() { return std::move(out_); }

  void module(const Module& m) {
    const Decl* prev = nullptr;
    for (const auto& d : m.decls) {
      if (prev && !(prev->isTypeDecl() && d.isTypeDecl()) &&
          !(prev->kind == Decl::Kind::Sig && d.kind == Decl::Kind::Fun &&
            prev->name == d.name))
        out_ += '\n';
      decl(d);
      prev = &d;
    }
  }

  void decl(const Decl& d) {
    std::size_t begin = out_.size();
    switch (d.kind) {
      case Decl::Kind::Alias:
      case Decl::Kind::Newtype:
      case Decl::Kind::Data: {
        out_ += d.kind == Decl::Kind::Alias     ? "type "
                : d.kind == Decl::Kind::Newtype ? "newtype "
                                                : "data ";
        out_ += d.nameFocused ? "{!" + d.name + "!}" : d.name;
        for (const auto& p : d.params) out_ += " " + p;
        out_ += " = ";
        if (d.kind == Decl::Kind::Alias) {
          type(d.type, TyCtx::Top, TypeSel::aliasRhs(d.name));
        } else {
          for (std::size_t i = 0; i < d.conss.size(); ++i) {
            if (i) out_ += " | ";
            consDecl(d, d.conss[i]);
          }
        }
        out_ += ";\n";
        span("decl", d.name, begin);
        break;
      }
      case Decl::Kind::Sig:
        out_ += d.name + " :: ";
        type(d.type, TyCtx::Top, TypeSel::sigType(d.name));
        out_ += ";\n";
        span("decl", d.name, begin);
        break;
      case Decl::Kind::Fun:
        for (std::size_t i = 0; i < d.equations.size(); ++i) {
          std::size_t eb = out_.size();
          equation(d.equations[i], i + 1);
          out_ += ";\n";
          span("equation", d.name + "/" + std::to_string(i + 1), eb);
        }
        break;
    }
  }

  void consDecl(const Decl& owner, const ConsDecl& c) {
    out_ += c.name;
    for (std::size_t i = 0; i < c.components.size(); ++i) {
      out_ += ' ';
      if (c.focus && c.focus->start == i + 1) out_ += "{! ";
      std::optional<TypeSel> sel;
      if (owner.kind == Decl::Kind::Newtype)
        sel = TypeSel::newtypeRhs(owner.name);
      else if (!owner.name.empty())
        sel = TypeSel::consComp(owner.name, c.name, i + 1);
      type(c.components[i], TyCtx::Component, sel);
      if (c.focus && c.focus->start + c.focus->count - 1 == i + 1) out_ += " !}";
    }
  }

  void type(const TypeExpr& t, TyCtx ctx, const std::optional<TypeSel>& sel) {
    std::size_t begin = out_.size();
    auto child = [&](std::size_t i) -> std::optional<TypeSel> {
      if (!sel) return std::nullopt;
      return sel->child(i);
    };
    switch (t.kind) {
      case TypeExpr::Kind::Var:
        out_ += t.name;
        break;
      case TypeExpr::Kind::App:
      case TypeExpr::Kind::FocusName: {
        bool parens = !t.args.empty() && (ctx == TyCtx::Arg || ctx == TyCtx::Component);
        if (parens) out_ += '(';
        out_ += t.kind == TypeExpr::Kind::FocusName ? "{!" + t.name + "!}" : t.name;
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          out_ += ' ';
          type(t.args[i], TyCtx::Arg, child(i + 1));
        }
        if (parens) out_ += ')';
        break;
      }
      case TypeExpr::Kind::Fun: {
        bool parens = ctx != TyCtx::Top;
        if (parens) out_ += '(';
        type(t.args[0], TyCtx::FunLeft, child(1));
        out_ += " -> ";
        type(t.args[1], TyCtx::Top, child(2));
        if (parens) out_ += ')';
        break;
      }
      case TypeExpr::Kind::Tuple:
        out_ += '(';
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          if (i) out_ += ", ";
          type(t.args[i], TyCtx::Top, child(i + 1));
        }
        out_ += ')';
        break;
      case TypeExpr::Kind::List:
        out_ += '[';
        type(t.args[0], TyCtx::Top, child(1));
        out_ += ']';
        break;
      case TypeExpr::Kind::Focus: {
        const TypeExpr& inner = t.args[0];
        out_ += "{! ";
        if (inner.kind == TypeExpr::Kind::App && inner.args.empty()) {
          out_ += '(';
          type(inner, TyCtx::Top, sel);
          out_ += ')';
        } else {
          type(inner, ctx == TyCtx::Component ? TyCtx::Arg : TyCtx::Top, sel);
        }
        out_ += " !}";
        return;  // the inner node carries the span
      }
    }
    if (sel) span("type", toString(*sel), begin);
  }

  void pattern(const Pattern& p, bool arg) {
    switch (p.kind) {
      case Pattern::Kind::Var: out_ += p.name; break;
      case Pattern::Kind::Wild: out_ += '_'; break;
      case Pattern::Kind::Lit: out_ += literal(p.lit); break;
      case Pattern::Kind::Con: {
        bool parens = arg && !p.args.empty();
        if (parens) out_ += '(';
        out_ += p.name;
        for (const auto& a : p.args) {
          out_ += ' ';
          pattern(a, true);
        }
        if (parens) out_ += ')';
        break;
      }
      case Pattern::Kind::Tuple:
        out_ += '(';
        for (std::size_t i = 0; i < p.args.size(); ++i) {
          if (i) out_ += ", ";
          pattern(p.args[i], false);
        }
        out_ += ')';
        break;
    }
  }

  void equation(const Equation& eq, std::size_t index) {
    out_ += eq.fun;
    for (const auto& p : eq.patterns) {
      out_ += ' ';
      pattern(p, true);
    }
    out_ += " = ";
    fun_ = eq.fun;
    eqIndex_ = index;
    path_.clear();
    expr(eq.rhs, ExCtx::Top);
  }

  void expr(const Expr& e, ExCtx ctx) {
    std::size_t begin = out_.size();
    auto kid = [&](const Expr& k, std::size_t step, ExCtx c) {
      path_.push_back(step);
      expr(k, c);
      path_.pop_back();
    };
    switch (e.kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Con:
        out_ += e.name;
        break;
      case Expr::Kind::Lit:
        out_ += literal(e.lit);
        break;
      case Expr::Kind::Undefined:
        out_ += "undefined";
        if (!fun_.empty())
          span(e.todo ? "todo" : "undefined",
               toString(TodoMarker{fun_, eqIndex_, path_}), begin);
        break;
      case Expr::Kind::App: {
        bool parens = ctx == ExCtx::Arg;
        if (parens) out_ += '(';
        kid(e.kids[0], 1, ExCtx::Head);
        out_ += ' ';
        kid(e.kids[1], 2, ExCtx::Arg);
        if (parens) out_ += ')';
        break;
      }
      case Expr::Kind::Lam: {
        bool parens = ctx != ExCtx::Top;
        if (parens) out_ += '(';
        out_ += '\\';
        for (std::size_t i = 0; i < e.params.size(); ++i) {
          if (i) out_ += ' ';
          out_ += e.params[i];
        }
        out_ += " -> ";
        kid(e.kids[0], 1, ExCtx::Top);
        if (parens) out_ += ')';
        break;
      }
      case Expr::Kind::Case: {
        bool parens = ctx != ExCtx::Top;
        if (parens) out_ += '(';
        out_ += "case ";
        kid(e.kids[0], 1, ExCtx::Top);
        out_ += " of { ";
        for (std::size_t i = 0; i < e.alts.size(); ++i) {
          if (i) out_ += "; ";
          pattern(e.alts[i].pat, false);
          out_ += " -> ";
          kid(e.alts[i].rhs, i + 2, ExCtx::Top);
        }
        out_ += " }";
        if (parens) out_ += ')';
        break;
      }
      case Expr::Kind::Tuple:
      case Expr::Kind::List: {
        bool tuple = e.kind == Expr::Kind::Tuple;
        out_ += tuple ? '(' : '[';
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
          if (i) out_ += ", ";
          kid(e.kids[i], i + 1, ExCtx::Top);
        }
        out_ += tuple ? ')' : ']';
        break;
      }
    }
  }

 private:
  void span(const char* kind, std::string ref, std::size_t begin) {
    if (spans_) spans_->push_back({kind, std::move(ref), begin, out_.size()});
  }

  std::string out_;
  std::vector<Span>* spans_;
  Name fun_;
  std::size_t eqIndex_ = 0;
  Path path_;
};

}  // namespace

std::string printModule(const Module& m) {
  Printer p(nullptr);
  p.module(m);
  return p.take();
}

std::string printModule(const Module& m, std::vector<Span>& spans) {
  Printer p(&spans);
  p.module(m);
  return p.take();
}

std::string printDecl(const Decl& d) {
  Printer p(nullptr);
  p.decl(d);
  std::string s = p.take();
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::string printType(const TypeExpr& t) {
  Printer p(nullptr);
  p.type(t, TyCtx::Top, std::nullopt);
  return p.take();
}

std::string printExpr(const Expr& e) {
  Printer p(nullptr);
  p.expr(e, ExCtx::Top);
  return p.take();
}

std::string printPattern(const Pattern& pat) {
  Printer p(nullptr);
  p.pattern(pat, false);
  return p.take();
}

std::string printConsDecl(const ConsDecl& c) {
  Printer p(nullptr);
  Decl owner;
  p.consDecl(owner, c);
  return p.take();
}

}  // namespace dtr
