#include "dtr/selector.hpp"

#include <charconv>

#include "dtr/error.hpp"

namespace dtr {

TypeSel TypeSel::aliasRhs(Name ty, Path p) {
  return {Kind::AliasRhs, std::move(ty), {}, 0, std::move(p)};
}
TypeSel TypeSel::newtypeRhs(Name ty, Path p) {
  return {Kind::NewtypeRhs, std::move(ty), {}, 0, std::move(p)};
}
TypeSel TypeSel::consComp(Name ty, Name cons, std::size_t index, Path p) {
  return {Kind::ConsComp, std::move(ty), std::move(cons), index, std::move(p)};
}
TypeSel TypeSel::sigType(Name fun, Path p) {
  return {Kind::SigType, std::move(fun), {}, 0, std::move(p)};
}

TypeSel TypeSel::child(std::size_t step) const {
  TypeSel s = *this;
  s.path.push_back(step);
  return s;
}

namespace {

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  fail(ErrorCode::BadArguments,
       std::string(what) + " '" + std::string(text) + "'");
}

std::size_t parseIndex(std::string_view s, std::string_view whole) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    bad("malformed index in selector", whole);
  return v;
}

std::vector<std::string_view> splitSlash(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '/') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

bool startsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string pathToString(const Path& p) {
  if (p.empty()) return ".";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

Path parsePath(std::string_view s) {
  Path p;
  if (s == "." || s.empty()) return p;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '.') {
      std::size_t v = parseIndex(s.substr(start, i - start), s);
      if (v == 0) bad("path steps are 1-based", s);
      p.push_back(v);
      start = i + 1;
    }
  }
  return p;
}

std::string toString(const TypeSel& s) {
  std::string out;
  switch (s.kind) {
    case TypeSel::Kind::AliasRhs: out = "alias:" + s.owner + "/rhs"; break;
    case TypeSel::Kind::NewtypeRhs: out = "newtype:" + s.owner + "/rhs"; break;
    case TypeSel::Kind::ConsComp:
      out = "cons:" + s.owner + "." + s.cons + "/" + std::to_string(s.index);
      break;
    case TypeSel::Kind::SigType: out = "sig:" + s.owner + "/type"; break;
  }
  if (!s.path.empty()) out += "/path:" + pathToString(s.path);
  return out;
}

std::string toString(const CompRangeSel& s) {
  return "cons:" + s.type + "." + s.cons + "/" + std::to_string(s.start) +
         ".." + std::to_string(s.start + s.count - 1);
}

std::string toString(const TypeNameSel& s) { return "type:" + s.type; }

std::string toString(const FocusTarget& t) {
  return std::visit([](const auto& s) { return toString(s); }, t);
}

std::string toString(const TodoMarker& t) {
  return t.fun + "/" + std::to_string(t.equation) + "/" + pathToString(t.path);
}

TypeSel parseTypeSel(std::string_view s) {
  auto parts = splitSlash(s);
  TypeSel sel;
  std::string_view head = parts[0];
  std::size_t next = 1;
  auto optional = [&](std::string_view word) {
    if (next < parts.size() && parts[next] == word) ++next;
  };
  if (startsWith(head, "alias:")) {
    sel.kind = TypeSel::Kind::AliasRhs;
    sel.owner = head.substr(6);
    optional("rhs");
  } else if (startsWith(head, "newtype:")) {
    sel.kind = TypeSel::Kind::NewtypeRhs;
    sel.owner = head.substr(8);
    optional("rhs");
  } else if (startsWith(head, "sig:")) {
    sel.kind = TypeSel::Kind::SigType;
    sel.owner = head.substr(4);
    optional("type");
  } else if (startsWith(head, "cons:")) {
    sel.kind = TypeSel::Kind::ConsComp;
    auto body = head.substr(5);
    auto dot = body.find('.');
    if (dot == std::string_view::npos || next >= parts.size())
      bad("expected cons:Type.Cons/index, got", s);
    sel.owner = body.substr(0, dot);
    sel.cons = body.substr(dot + 1);
    auto idx = parts[next++];
    if (idx.find("..") != std::string_view::npos)
      bad("component range where a single component was expected", s);
    sel.index = parseIndex(idx, s);
  } else {
    bad("unknown selector", s);
  }
  if (next < parts.size() && startsWith(parts[next], "path:")) {
    sel.path = parsePath(parts[next].substr(5));
    ++next;
  }
  if (next != parts.size() || sel.owner.empty()) bad("malformed selector", s);
  return sel;
}

CompRangeSel parseCompRangeSel(std::string_view s) {
  if (!startsWith(s, "cons:")) bad("expected cons:Type.Cons/start..end, got", s);
  auto parts = splitSlash(s.substr(5));
  if (parts.size() != 2) bad("malformed component range", s);
  auto dot = parts[0].find('.');
  if (dot == std::string_view::npos) bad("malformed component range", s);
  CompRangeSel r;
  r.type = parts[0].substr(0, dot);
  r.cons = parts[0].substr(dot + 1);
  auto range = parts[1];
  auto dd = range.find("..");
  if (dd == std::string_view::npos) {
    r.start = parseIndex(range, s);
    r.count = 1;
  } else {
    r.start = parseIndex(range.substr(0, dd), s);
    std::size_t end = parseIndex(range.substr(dd + 2), s);
    if (end < r.start) bad("empty component range", s);
    r.count = end - r.start + 1;
  }
  if (r.start == 0) bad("component indices are 1-based", s);
  return r;
}

FocusTarget parseFocusTarget(std::string_view s) {
  if (startsWith(s, "type:")) {
    if (s.size() == 5) bad("missing type name", s);
    return TypeNameSel{std::string(s.substr(5))};
  }
  if (startsWith(s, "cons:") && s.find("..") != std::string_view::npos)
    return parseCompRangeSel(s);
  return parseTypeSel(s);
}

TodoMarker parseTodoMarker(std::string_view s) {
  auto parts = splitSlash(s);
  if (parts.size() != 3 || parts[0].empty()) bad("malformed to-do marker", s);
  TodoMarker t;
  t.fun = parts[0];
  t.equation = parseIndex(parts[1], s);
  t.path = parsePath(parts[2]);
  return t;
}

}  // namespace dtr
