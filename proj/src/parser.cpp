#include <cctype>
#include <charconv>

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"

namespace dtr {
namespace {

enum class Tok {
  ConId,
  VarId,
  Int,
  String,
  Type,
  Newtype,
  Data,
  Case,
  Of,
  Undefined,
  Wild,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  FocusOpen,
  FocusClose,
  Comma,
  Semi,
  Bar,
  Equals,
  DColon,
  Arrow,
  Backslash,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long long number = 0;
  int line = 1;
  int column = 1;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::ConId: return "constructor or type name";
    case Tok::VarId: return "variable";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::Type: return "'type'";
    case Tok::Newtype: return "'newtype'";
    case Tok::Data: return "'data'";
    case Tok::Case: return "'case'";
    case Tok::Of: return "'of'";
    case Tok::Undefined: return "'undefined'";
    case Tok::Wild: return "'_'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::FocusOpen: return "'{!'";
    case Tok::FocusClose: return "'!}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Bar: return "'|'";
    case Tok::Equals: return "'='";
    case Tok::DColon: return "'::'";
    case Tok::Arrow: return "'->'";
    case Tok::Backslash: return "'\\'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool identChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok k, std::size_t len, std::string text = {}) {
    out.push_back({k, std::move(text), 0, line, col});
    advance(len);
  };
  while (i < src.size()) {
    char c = src[i];
    char n = i + 1 < src.size() ? src[i + 1] : '\0';
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && n == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(n)))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      Token t{Tok::Int, std::string(src.substr(i, j - i)), 0, line, col};
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, t.number);
      if (ec != std::errc{}) throw SyntaxError(line, col, "integer out of range");
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (c == '"') {
      int l0 = line, c0 = col;
      std::string text;
      advance(1);
      while (true) {
        if (i >= src.size() || src[i] == '\n')
          throw SyntaxError(l0, c0, "unterminated string literal");
        char d = src[i];
        if (d == '"') {
          advance(1);
          break;
        }
        if (d == '\\') {
          if (i + 1 >= src.size())
            throw SyntaxError(line, col, "unterminated string literal");
          char e = src[i + 1];
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '\\': text += '\\'; break;
            case '"': text += '"'; break;
            default: throw SyntaxError(line, col, "unknown escape sequence");
          }
          advance(2);
          continue;
        }
        text += d;
        advance(1);
      }
      out.push_back({Tok::String, std::move(text), 0, l0, c0});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && identChar(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      Tok k = std::isupper(static_cast<unsigned char>(c)) ? Tok::ConId : Tok::VarId;
      if (word == "type") k = Tok::Type;
      else if (word == "newtype") k = Tok::Newtype;
      else if (word == "data") k = Tok::Data;
      else if (word == "case") k = Tok::Case;
      else if (word == "of") k = Tok::Of;
      else if (word == "undefined") k = Tok::Undefined;
      else if (word == "_") k = Tok::Wild;
      push(k, j - i, std::move(word));
      continue;
    }
    if (c == '{' && n == '!') { push(Tok::FocusOpen, 2); continue; }
    if (c == '!' && n == '}') { push(Tok::FocusClose, 2); continue; }
    if (c == ':' && n == ':') { push(Tok::DColon, 2); continue; }
    if (c == '-' && n == '>') { push(Tok::Arrow, 2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '|': push(Tok::Bar, 1); continue;
      case '=': push(Tok::Equals, 1); continue;
      case '\\': push(Tok::Backslash, 1); continue;
      default:
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, {}, 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Module module() {
    Module m;
    while (!at(Tok::End)) {
      declInto(m.decls);
      expect(Tok::Semi);
    }
    return m;
  }

  std::vector<Decl> decls() {
    std::vector<Decl> out;
    while (!at(Tok::End)) {
      declInto(out);
      if (!at(Tok::End)) expect(Tok::Semi);
    }
    return out;
  }

  TypeExpr typeOnly() {
    TypeExpr t = type();
    expect(Tok::End);
    return t;
  }

  ConsDecl consOnly() {
    ConsDecl c = consDecl();
    expect(Tok::End);
    return c;
  }

  Expr exprOnly() {
    Expr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void error(const std::string& msg) const {
    throw SyntaxError(peek().line, peek().column, msg);
  }

  Token expect(Tok k) {
    if (!at(k))
      error(std::string("expected ") + describe(k) + ", found " +
            describe(peek().kind) +
            (peek().text.empty() ? "" : " '" + peek().text + "'"));
    return take();
  }

  // -- declarations --------------------------------------------------------

  void declInto(std::vector<Decl>& out) {
    switch (peek().kind) {
      case Tok::Type:
      case Tok::Newtype:
      case Tok::Data:
        out.push_back(typeDecl());
        return;
      case Tok::VarId:
        if (peek(1).kind == Tok::DColon) {
          Decl d;
          d.kind = Decl::Kind::Sig;
          d.name = take().text;
          take();
          d.type = type();
          out.push_back(std::move(d));
          return;
        }
        equationInto(out);
        return;
      default:
        error(std::string("expected a declaration, found ") + describe(peek().kind));
    }
  }

  Decl typeDecl() {
    Decl d;
    Tok k = take().kind;
    d.kind = k == Tok::Type      ? Decl::Kind::Alias
             : k == Tok::Newtype ? Decl::Kind::Newtype
                                 : Decl::Kind::Data;
    if (at(Tok::FocusOpen)) {
      take();
      d.name = expect(Tok::ConId).text;
      expect(Tok::FocusClose);
      d.nameFocused = true;
    } else {
      d.name = expect(Tok::ConId).text;
    }
    while (at(Tok::VarId)) d.params.push_back(take().text);
    expect(Tok::Equals);
    if (d.kind == Decl::Kind::Alias) {
      d.type = type();
    } else if (d.kind == Decl::Kind::Newtype) {
      d.conss.push_back(consDecl());
    } else {
      d.conss.push_back(consDecl());
      while (at(Tok::Bar)) {
        take();
        d.conss.push_back(consDecl());
      }
    }
    return d;
  }

  bool startsAtype() const {
    switch (peek().kind) {
      case Tok::VarId:
      case Tok::ConId:
      case Tok::LParen:
      case Tok::LBracket:
      case Tok::FocusOpen:
        return true;
      default:
        return false;
    }
  }

  ConsDecl consDecl() {
    ConsDecl c;
    c.name = expect(Tok::ConId).text;
    while (startsAtype()) {
      if (!at(Tok::FocusOpen) || isNameFocus()) {
        c.components.push_back(atype());
        continue;
      }
      take();
      std::vector<TypeExpr> run;
      while (!at(Tok::FocusClose)) {
        if (!startsAtype()) error("expected a constructor component inside focus");
        run.push_back(atype());
      }
      take();
      if (run.empty()) error("empty focus");
      if (run.size() == 1) {
        c.components.push_back(TypeExpr::focus(std::move(run[0])));
      } else {
        if (c.focus) error("two component foci in one constructor");
        c.focus = CompRange{c.components.size() + 1, run.size()};
        for (auto& t : run) c.components.push_back(std::move(t));
      }
    }
    return c;
  }

  void equationInto(std::vector<Decl>& out) {
    Equation eq;
    eq.fun = expect(Tok::VarId).text;
    while (!at(Tok::Equals)) eq.patterns.push_back(apat());
    take();
    eq.rhs = expr();
    if (!out.empty() && out.back().kind == Decl::Kind::Fun &&
        out.back().name == eq.fun) {
      out.back().equations.push_back(std::move(eq));
      return;
    }
    Decl d;
    d.kind = Decl::Kind::Fun;
    d.name = eq.fun;
    d.equations.push_back(std::move(eq));
    out.push_back(std::move(d));
  }

  // -- types ---------------------------------------------------------------

  bool isNameFocus() const {
    return at(Tok::FocusOpen) && peek(1).kind == Tok::ConId &&
           peek(2).kind == Tok::FocusClose;
  }

  TypeExpr type() {
    TypeExpr t = btype();
    if (at(Tok::Arrow)) {
      take();
      return TypeExpr::fun(std::move(t), type());
    }
    return t;
  }

  TypeExpr btype() {
    if (at(Tok::ConId) || isNameFocus()) {
      bool focused = at(Tok::FocusOpen);
      if (focused) take();
      Name n = take().text;
      if (focused) take();
      std::vector<TypeExpr> args;
      while (startsAtype()) args.push_back(atype());
      return focused ? TypeExpr::focusName(std::move(n), std::move(args))
                     : TypeExpr::app(std::move(n), std::move(args));
    }
    return atype();
  }

  TypeExpr atype() {
    switch (peek().kind) {
      case Tok::VarId:
        return TypeExpr::var(take().text);
      case Tok::ConId:
        return TypeExpr::app(take().text);
      case Tok::FocusOpen: {
        take();
        if (at(Tok::ConId) && peek(1).kind == Tok::FocusClose) {
          Name n = take().text;
          take();
          return TypeExpr::focusName(std::move(n));
        }
        TypeExpr inner = type();
        expect(Tok::FocusClose);
        return TypeExpr::focus(std::move(inner));
      }
      case Tok::LParen: {
        take();
        std::vector<TypeExpr> elems{type()};
        while (at(Tok::Comma)) {
          take();
          elems.push_back(type());
        }
        expect(Tok::RParen);
        if (elems.size() == 1) return std::move(elems[0]);
        return TypeExpr::tuple(std::move(elems));
      }
      case Tok::LBracket: {
        take();
        TypeExpr e = type();
        expect(Tok::RBracket);
        return TypeExpr::list(std::move(e));
      }
      default:
        error(std::string("expected a type, found ") + describe(peek().kind));
    }
  }

  // -- patterns ------------------------------------------------------------

  Pattern pattern() {
    if (at(Tok::ConId)) {
      Name c = take().text;
      std::vector<Pattern> args;
      while (startsApat()) args.push_back(apat());
      return Pattern::con(std::move(c), std::move(args));
    }
    return apat();
  }

  bool startsApat() const {
    switch (peek().kind) {
      case Tok::VarId:
      case Tok::Wild:
      case Tok::ConId:
      case Tok::Int:
      case Tok::String:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  Pattern apat() {
    switch (peek().kind) {
      case Tok::VarId: return Pattern::var(take().text);
      case Tok::Wild: take(); return Pattern::wild();
      case Tok::ConId: return Pattern::con(take().text);
      case Tok::Int: return Pattern::literal(Literal{take().number});
      case Tok::String: return Pattern::literal(Literal{take().text});
      case Tok::LParen: {
        take();
        std::vector<Pattern> ps{pattern()};
        while (at(Tok::Comma)) {
          take();
          ps.push_back(pattern());
        }
        expect(Tok::RParen);
        if (ps.size() == 1) return std::move(ps[0]);
        return Pattern::tuple(std::move(ps));
      }
      default:
        error(std::string("expected a pattern, found ") + describe(peek().kind));
    }
  }

  // -- expressions ---------------------------------------------------------

  Expr expr() {
    if (at(Tok::Backslash)) {
      take();
      std::vector<Name> ps;
      while (at(Tok::VarId)) ps.push_back(take().text);
      if (ps.empty()) error("lambda needs at least one parameter");
      expect(Tok::Arrow);
      return Expr::lam(std::move(ps), expr());
    }
    if (at(Tok::Case)) {
      take();
      Expr scrut = expr();
      expect(Tok::Of);
      expect(Tok::LBrace);
      std::vector<Alt> alts;
      while (true) {
        Pattern p = pattern();
        expect(Tok::Arrow);
        alts.push_back({std::move(p), expr()});
        if (!at(Tok::Semi)) break;
        take();
        if (at(Tok::RBrace)) break;
      }
      expect(Tok::RBrace);
      return Expr::caseOf(std::move(scrut), std::move(alts));
    }
    if (!startsAexpr()) error(std::string("expected an expression, found ") +
                              describe(peek().kind));
    Expr e = aexpr();
    while (startsAexpr()) e = Expr::app(std::move(e), aexpr());
    return e;
  }

  bool startsAexpr() const {
    switch (peek().kind) {
      case Tok::VarId:
      case Tok::ConId:
      case Tok::Int:
      case Tok::String:
      case Tok::Undefined:
      case Tok::LParen:
      case Tok::LBracket:
        return true;
      default:
        return false;
    }
  }

  Expr aexpr() {
    switch (peek().kind) {
      case Tok::VarId: return Expr::var(take().text);
      case Tok::ConId: return Expr::con(take().text);
      case Tok::Int: return Expr::literal(Literal{take().number});
      case Tok::String: return Expr::literal(Literal{take().text});
      case Tok::Undefined: take(); return Expr::undefined();
      case Tok::LParen: {
        take();
        std::vector<Expr> es{expr()};
        while (at(Tok::Comma)) {
          take();
          es.push_back(expr());
        }
        expect(Tok::RParen);
        if (es.size() == 1) return std::move(es[0]);
        return Expr::tuple(std::move(es));
      }
      case Tok::LBracket: {
        take();
        std::vector<Expr> es;
        if (!at(Tok::RBracket)) {
          es.push_back(expr());
          while (at(Tok::Comma)) {
            take();
            es.push_back(expr());
          }
        }
        expect(Tok::RBracket);
        return Expr::list(std::move(es));
      }
      default:
        error("expected an expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Module parseModuleUnchecked(std::string_view text) {
  return Parser(text).module();
}

Module parseModule(std::string_view text) {
  Module m = parseModuleUnchecked(text);
  checkWellFormed(m);
  return m;
}

std::vector<Decl> parseDecls(std::string_view text) {
  return Parser(text).decls();
}

TypeExpr parseTypeFragment(std::string_view text) {
  return Parser(text).typeOnly();
}

ConsDecl parseConsDecl(std::string_view text) {
  return Parser(text).consOnly();
}

Expr parseExpr(std::string_view text) { return Parser(text).exprOnly(); }

}  // namespace dtr
