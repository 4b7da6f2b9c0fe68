#include "dtr/engine.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "dtr/concrete.hpp"
#include "dtr/datatype_ops.hpp"
#include "dtr/focus.hpp"
#include "dtr/program_lift.hpp"

namespace dtr {

// ---------------------------------------------------------------------------
// Invocation syntax

namespace {

[[noreturn]] void badArgs(const std::string& why) { fail(ErrorCode::BadArguments, why); }

bool needsQuotes(const std::string& a) {
  if (a.empty()) return true;
  if (a.rfind("unifier(", 0) == 0) return false;
  return std::any_of(a.begin(), a.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '"' || c == '#' || c == '\\';
  });
}

std::string quote(const std::string& a) {
  std::string out = "\"";
  for (char c : a) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    std::string tok;
    if (c == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char d = line[i++];
        if (d == '\\' && i < line.size()) {
          tok += line[i++];
        } else if (d == '"') {
          closed = true;
          break;
        } else {
          tok += d;
        }
      }
      if (!closed) badArgs("unterminated string");
      out.push_back(std::move(tok));
      continue;
    }
    int depth = 0;
    while (i < line.size()) {
      char d = line[i];
      if (depth == 0 && (d == ' ' || d == '\t' || d == '\r')) break;
      if (d == '(') ++depth;
      if (d == ')') --depth;
      tok += d;
      ++i;
    }
    if (depth != 0) badArgs("unbalanced parentheses in " + tok);
    out.push_back(std::move(tok));
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? p : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::size_t parseIndex(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0)
    badArgs("expected a positive number, got '" + s + "'");
  return v;
}

Permutation parsePermutation(const std::string& s) {
  Permutation p;
  for (const auto& part : split(s, ',')) p.push_back(parseIndex(part));
  return p;
}

std::pair<Name, Name> parsePair(const std::string& s) {
  auto parts = split(s, '=');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
    badArgs("expected Old=New, got '" + s + "'");
  return {parts[0], parts[1]};
}

DataUnifier parseUnifier(const std::string& s) {
  if (s.rfind("unifier(", 0) != 0 || s.back() != ')')
    badArgs("expected unifier(Old=New; C=D, ...), got '" + s + "'");
  std::string body = s.substr(8, s.size() - 9);
  auto halves = split(body, ';');
  if (halves.size() > 2) badArgs("too many ';' in " + s);
  DataUnifier u;
  std::tie(u.oldTy, u.newTy) = parsePair(halves[0]);
  if (halves.size() == 2 && !halves[1].empty())
    for (const auto& pr : split(halves[1], ',')) u.consPairs.push_back(parsePair(pr));
  return u;
}

std::string printUnifier(const DataUnifier& u) {
  std::string out = "unifier(" + u.oldTy + "=" + u.newTy + ";";
  for (std::size_t i = 0; i < u.consPairs.size(); ++i)
    out += std::string(i ? ", " : " ") + u.consPairs[i].first + "=" + u.consPairs[i].second;
  return out + ")";
}

std::string stripPrefix(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0 ? s.substr(prefix.size()) : s;
}

// The type owning a constructor, for verbs that only name the constructor.
Name ownerOf(const Module& m, const Name& cons) {
  auto c = m.findCons(cons);
  if (!c) fail(ErrorCode::UnknownName, "no constructor " + cons);
  return c->type->name;
}

struct Args {
  const OpInvocation& inv;

  std::size_t size() const { return inv.args.size(); }
  const std::string& operator[](std::size_t i) const { return inv.args.at(i); }
  void expect(std::size_t lo, std::size_t hi) const {
    if (size() < lo || size() > hi)
      badArgs(inv.op + " expects " + opUsage(inv.op));
  }
  // Position of the `at` keyword, which must be followed by one selector.
  std::size_t at() const {
    auto it = std::find(inv.args.begin(), inv.args.end(), "at");
    if (it == inv.args.end() || it + 2 != inv.args.end())
      badArgs(inv.op + " expects " + opUsage(inv.op));
    return static_cast<std::size_t>(it - inv.args.begin());
  }
};

FoldKind parseFoldKind(const std::string& s) {
  if (s == "alias" || s == "type") return FoldKind::Alias;
  if (s == "newtype") return FoldKind::Newtype;
  if (s == "data") return FoldKind::Data;
  badArgs("fold kind must be alias, newtype or data, got '" + s + "'");
}

FoldRequest parseExtract(const Args& a) {
  a.expect(3, 5);
  FoldRequest r;
  r.range = parseCompRangeSel(a[0]);
  r.typeName = a[1];
  r.kind = parseFoldKind(a[2]);
  for (std::size_t i = 3; i < a.size(); ++i) {
    if (a[i] == "intro") r.introduce = true;
    else if (a[i] == "nointro") r.introduce = false;
    else r.consName = a[i];
  }
  return r;
}

using Handler = std::function<Module(const Module&, const Args&, unsigned)>;

struct OpSpec {
  std::string name;
  std::string usage;
  Handler run;
};

const std::vector<OpSpec>& catalogue() {
  static const std::vector<OpSpec> ops = {
      {"rename-type", "<old:Type> <new:Type>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(2, 2);
         return renameType(m, a[0], a[1]);
       }},
      {"rename-cons", "<old:Cons> <new:Cons>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(2, 2);
         return liftRenameCons(renameConsDecl(m, a[0], a[1]), a[0], a[1]);
       }},
      {"permute-params", "<Type> <i,j,...>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(2, 2);
         return permuteTypeParams(m, a[0], parsePermutation(a[1]));
       }},
      {"permute-cons", "<Cons> <i,j,...>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(2, 2);
         Permutation p = parsePermutation(a[1]);
         return liftPermuteComponents(permuteConsDecl(m, a[0], p), a[0], p);
       }},
      {"introduce", "\"<type declarations>\"",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         return introduce(m, parseDecls(a[0]));
       }},
      {"eliminate", "<Type> [<Type> ...]",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 64);
         return eliminate(m, a.inv.args);
       }},
      {"fold-alias", "<Alias> at <selector> [with p=1.2,q=2]",
       [](const Module& m, const Args& a, unsigned) {
         std::optional<ArgMap> map;
         std::vector<std::string> rest = a.inv.args;
         auto w = std::find(rest.begin(), rest.end(), "with");
         if (w != rest.end()) {
           if (w + 2 != rest.end()) badArgs("fold-alias expects " + opUsage("fold-alias"));
           map.emplace();
           for (const auto& kv : split(*(w + 1), ',')) {
             auto [p, path] = parsePair(kv);
             (*map)[p] = parsePath(path);
           }
           rest.erase(w, rest.end());
         }
         OpInvocation core{a.inv.op, rest};
         Args b{core};
         std::size_t at = b.at();
         if (at != 1) badArgs("fold-alias expects " + opUsage("fold-alias"));
         TypeHdr hdr{stripPrefix(stripPrefix(b[0], "alias:"), "type:"), {}};
         return foldAlias(m, parseTypeSel(b[2]), hdr, map);
       }},
      {"unfold-alias", "<selector>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         return unfoldAlias(m, parseTypeSel(a[0]));
       }},
      {"group", "cons:<Type>.<Cons>/<s>..<e>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         CompRangeSel r = parseCompRangeSel(a[0]);
         return liftGroup(groupComponents(m, r), r);
       }},
      {"ungroup", "cons:<Type>.<Cons>/<i>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         TypeSel s = parseTypeSel(a[0]);
         if (s.kind != TypeSel::Kind::ConsComp || !s.path.empty())
           badArgs("ungroup expects " + opUsage("ungroup"));
         TypeExpr t = resolve(m, s);
         Module out = ungroupComponent(m, s.owner, s.cons, s.index);
         return liftUngroup(out, s.cons, s.index, t.args.size());
       }},
      {"alias2newtype", "<Alias> <Cons>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(2, 2);
         return liftAlias2Newtype(m, alias2newtype(m, a[0], a[1]), a[0], a[1]);
       }},
      {"newtype2alias", "<Newtype>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         Module out = newtype2alias(m, a[0]);
         return liftNewtype2Alias(out, m.findType(a[0])->conss.at(0).name);
       }},
      {"newtype2data", "<Newtype>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         return newtype2data(m, a[0]);
       }},
      {"data2newtype", "<Type>",
       [](const Module& m, const Args& a, unsigned) {
         a.expect(1, 1);
         return data2newtype(m, a[0]);
       }},
      {"swap-alias", "<OldAlias> <NewAlias> at <selector>",
       [](const Module& m, const Args& a, unsigned) {
         if (a.at() != 2) badArgs("swap-alias expects " + opUsage("swap-alias"));
         return swapAlias(m, a[0], a[1], parseTypeSel(a[3]));
       }},
      {"swap-data", "unifier(Old=New; C=D, ...) [unifier(...) ...] at <selector>",
       [](const Module& m, const Args& a, unsigned) {
         std::size_t at = a.at();
         if (at == 0) badArgs("swap-data expects " + opUsage("swap-data"));
         std::vector<DataUnifier> us;
         for (std::size_t i = 0; i < at; ++i) us.push_back(parseUnifier(a[i]));
         return liftSwap(m, swapData(m, us, parseTypeSel(a[at + 1])), us);
       }},
      {"include", "<Type> \"<Cons> <components>\" [<position>]",
       [](const Module& m, const Args& a, unsigned tag) {
         a.expect(2, 3);
         ConsDecl c = parseConsDecl(a[1]);
         std::size_t pos = a.size() == 3 ? parseIndex(a[2]) : 0;
         return liftInclude(m, includeCons(m, a[0], c, pos), a[0], c.name, tag);
       }},
      {"exclude", "<Cons>",
       [](const Module& m, const Args& a, unsigned tag) {
         a.expect(1, 1);
         return liftExclude(m, excludeCons(m, ownerOf(m, a[0]), a[0]), a[0], tag);
       }},
      {"insert", "<Cons> <position> \"<type>\"",
       [](const Module& m, const Args& a, unsigned tag) {
         a.expect(3, 3);
         std::size_t i = parseIndex(a[1]);
         Module out = insertComponent(m, a[0], i, parseTypeFragment(a[2]));
         return liftInsert(m, out, a[0], i, tag);
       }},
      {"delete", "<Cons> <position>",
       [](const Module& m, const Args& a, unsigned tag) {
         a.expect(2, 2);
         std::size_t i = parseIndex(a[1]);
         return liftDelete(m, deleteComponent(m, a[0], i), a[0], i, tag);
       }},
      {"extract", "cons:<Type>.<Cons>/<s>..<e> <Name> alias|newtype|data [<Cons>] [intro|nointro]",
       [](const Module& m, const Args& a, unsigned) {
         TrafoResult r = compoundFold(m, parseExtract(a));
         if (!r.ok) throw Error(r.code, r.detail, r.locations);
         return r.module;
       }},
  };
  return ops;
}

const OpSpec& specFor(const std::string& op) {
  for (const auto& s : catalogue())
    if (s.name == op) return s;
  badArgs("unknown operator '" + op + "'");
}

unsigned todoTag(const Module& m, const TodoMarker& t) { return resolveTodo(m, t).todo; }

std::vector<TodoMarker> todosSince(const Module& m, unsigned firstTag) {
  std::vector<TodoMarker> out;
  for (const auto& t : todoMarkers(m))
    if (todoTag(m, t) >= firstTag) out.push_back(t);
  return out;
}

}  // namespace

std::string OpInvocation::toString() const {
  std::string out = op;
  for (const auto& a : args) out += " " + (needsQuotes(a) ? quote(a) : a);
  return out;
}

OpInvocation parseInvocation(std::string_view line) {
  auto toks = tokenize(line);
  if (toks.empty()) badArgs("empty operator invocation");
  OpInvocation inv{toks[0], {toks.begin() + 1, toks.end()}};
  specFor(inv.op);
  return inv;
}

Script parseScript(std::string_view text) {
  Script s;
  std::size_t lineNo = 0, start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    ++lineNo;
    try {
      if (!tokenize(line).empty()) s.push_back(parseInvocation(line));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(lineNo) + ": " + e.detail());
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return s;
}

std::string printScript(const Script& s) {
  std::string out;
  for (const auto& inv : s) out += inv.toString() + "\n";
  return out;
}

const std::vector<std::string>& opNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : catalogue()) v.push_back(s.name);
    return v;
  }();
  return names;
}

std::string opUsage(const std::string& op) { return specFor(op).usage; }

// ---------------------------------------------------------------------------
// Results and composition

TrafoResult TrafoResult::success(Module m) {
  TrafoResult r;
  r.ok = true;
  r.module = std::move(m);
  return r;
}

TrafoResult TrafoResult::refusal(const Module& input, const Error& e) {
  TrafoResult r;
  r.module = input;
  r.code = e.code();
  r.detail = e.detail();
  r.locations = e.locations();
  return r;
}

std::optional<Module> TrafoResult::asOptional() const {
  if (!ok) return std::nullopt;
  return module;
}

std::vector<std::string> changedLocations(const Module& before, const Module& after) {
  auto key = [](const Decl& d) {
    return std::make_pair(d.isTypeDecl() ? 0 : static_cast<int>(d.kind), d.name);
  };
  std::map<std::pair<int, Name>, const Decl*> old;
  for (const auto& d : before.decls) old[key(d)] = &d;
  std::vector<std::string> out;
  auto typeLoc = [](const Decl& d) { return "type:" + d.name; };
  for (const auto& d : after.decls) {
    auto it = old.find(key(d));
    const Decl* o = it == old.end() ? nullptr : it->second;
    if (it != old.end()) old.erase(it);
    if (o && printDecl(*o) == printDecl(d)) continue;
    switch (d.kind) {
      case Decl::Kind::Sig: out.push_back("sig:" + d.name + "/type"); break;
      case Decl::Kind::Fun:
        for (std::size_t i = 0; i < d.equations.size(); ++i) {
          bool same = o && i < o->equations.size() &&
                      printDecl(Decl{Decl::Kind::Fun, d.name, {}, {}, {}, {o->equations[i]}, false}) ==
                          printDecl(Decl{Decl::Kind::Fun, d.name, {}, {}, {}, {d.equations[i]}, false});
          if (!same) out.push_back(d.name + "/" + std::to_string(i + 1));
        }
        if (o && o->equations.size() > d.equations.size()) out.push_back(d.name);
        break;
      default: out.push_back(typeLoc(d));
    }
  }
  for (const auto& [k, d] : old)
    out.push_back(d->isTypeDecl() ? typeLoc(*d)
                                  : d->kind == Decl::Kind::Sig ? "sig:" + d->name + "/type"
                                                               : d->name);
  return out;
}

TrafoResult applyOp(const Module& m, const OpInvocation& inv) {
  try {
    const OpSpec& spec = specFor(inv.op);
    Module m0 = stripFocus(m);
    unsigned tag = nextTodoTag(m0);
    Module out = spec.run(m0, Args{inv}, tag);
    try {
      checkWellFormed(out);
    } catch (const Error& e) {
      fail(ErrorCode::IllFormed, "the result would be ill-formed: " + e.detail(),
           e.locations());
    }
    TrafoResult r = TrafoResult::success(std::move(out));
    r.todos = todosSince(r.module, tag);
    r.changed = changedLocations(m0, r.module);
    r.steps.push_back(StepSummary{inv, r.changed, r.todos});
    return r;
  } catch (const Error& e) {
    return TrafoResult::refusal(m, e);
  }
}

Trafo opTrafo(OpInvocation inv) {
  return [inv = std::move(inv)](const Module& m) { return applyOp(m, inv); };
}

Trafo identityTrafo() {
  return [](const Module& m) { return TrafoResult::success(m); };
}

Trafo seqTrafo(Trafo t1, Trafo t2) {
  return [t1 = std::move(t1), t2 = std::move(t2)](const Module& m) {
    TrafoResult r1 = t1(m);
    if (!r1.ok) {
      r1.failedStep = std::max<std::size_t>(r1.failedStep, 1);
      return r1;
    }
    TrafoResult r2 = t2(r1.module);
    if (!r2.ok) {
      r2.failedStep = r1.steps.size() + std::max<std::size_t>(r2.failedStep, 1);
      r2.module = m;
      r2.steps = std::move(r1.steps);
      return r2;
    }
    Module m0 = stripFocus(m);
    TrafoResult r = TrafoResult::success(std::move(r2.module));
    r.steps = std::move(r1.steps);
    r.steps.insert(r.steps.end(), r2.steps.begin(), r2.steps.end());
    r.todos = todosSince(r.module, nextTodoTag(m0));
    r.changed = changedLocations(m0, r.module);
    return r;
  };
}

TrafoResult runScript(const Module& m, const Script& s) {
  Trafo t = identityTrafo();
  for (const auto& inv : s) t = seqTrafo(std::move(t), opTrafo(inv));
  return t(m);
}

// ---------------------------------------------------------------------------
// The fold dialogue

Script expandCompoundFold(const Module& input, const FoldRequest& req) {
  Module m = stripFocus(input);
  const ConsDecl& c = resolveRange(m, req.range);
  const Decl* owner = m.findType(req.range.type);
  bool intro = req.introduce.value_or(m.findType(req.typeName) == nullptr);
  Name cons = req.consName.empty() ? req.typeName : req.consName;

  std::vector<TypeExpr> parts(c.components.begin() + static_cast<long>(req.range.start - 1),
                              c.components.begin() +
                                  static_cast<long>(req.range.start - 1 + req.range.count));
  for (auto& p : parts) p = stripFocus(p);
  TypeExpr comp = parts.size() == 1 ? parts[0] : TypeExpr::tuple(parts);

  Script s;
  if (req.range.count > 1) s.push_back({"group", {toString(req.range)}});
  if (intro) {
    std::set<Name> fv = freeTypeVars(comp);
    std::string hdr = req.typeName;
    for (const auto& p : owner->params)
      if (fv.count(p)) hdr += " " + p;
    s.push_back({"introduce", {"type " + hdr + " = " + printType(comp)}});
  }
  TypeSel target = TypeSel::consComp(req.range.type, req.range.cons, req.range.start);
  s.push_back({"fold-alias", {req.typeName, "at", toString(target)}});
  if (req.kind != FoldKind::Alias) s.push_back({"alias2newtype", {req.typeName, cons}});
  if (req.kind == FoldKind::Data) {
    s.push_back({"newtype2data", {req.typeName}});
    if (req.range.count > 1)
      s.push_back({"ungroup", {toString(TypeSel::consComp(req.typeName, cons, 1))}});
  }
  return s;
}

TrafoResult compoundFold(const Module& m, const FoldRequest& req) {
  Script s;
  try {
    s = expandCompoundFold(m, req);
  } catch (const Error& e) {
    TrafoResult r = TrafoResult::refusal(m, e);
    r.failedStep = 1;
    return r;
  }
  return runScript(m, s);
}

// ---------------------------------------------------------------------------
// Operator catalogue for a focus

namespace {

bool nameInUse(const Module& m, const Name& n) {
  return m.findType(n) || m.findCons(n) || isBuiltinType(n);
}

Name freshConName(const Module& m, const Name& base) {
  for (unsigned i = 2;; ++i) {
    Name cand = base + std::to_string(i);
    if (!nameInUse(m, cand)) return cand;
  }
}

void typeNameOps(const Module& m, const Name& t, std::vector<OpInvocation>& out) {
  out.push_back({"rename-type", {t, freshConName(m, t)}});
  out.push_back({"eliminate", {t}});
  out.push_back({"alias2newtype", {t, nameInUse(m, t) && m.findCons(t) ? freshConName(m, t) : t}});
  out.push_back({"newtype2alias", {t}});
  out.push_back({"newtype2data", {t}});
  out.push_back({"data2newtype", {t}});
  if (const Decl* d = m.findType(t)) {
    if (d->params.size() > 1) {
      std::string p;
      for (std::size_t i = d->params.size(); i > 0; --i)
        p += std::to_string(i) + (i > 1 ? "," : "");
      out.push_back({"permute-params", {t, p}});
    }
    if (d->kind == Decl::Kind::Data)
      out.push_back({"include", {t, freshConName(m, t + "Con")}});
  }
}

void componentOps(const Module& m, const CompRangeSel& r, std::vector<OpInvocation>& out) {
  Name fresh = freshConName(m, "New");
  if (r.count > 1) out.push_back({"group", {toString(r)}});
  if (r.count == 1) {
    out.push_back({"ungroup", {toString(TypeSel::consComp(r.type, r.cons, r.start))}});
    out.push_back({"delete", {r.cons, std::to_string(r.start)}});
  }
  for (const char* kind : {"alias", "newtype", "data"})
    out.push_back({"extract", {toString(r), fresh, kind}});
  const ConsDecl& c = resolveRange(m, r);
  if (c.components.size() > 1) {
    std::string p;
    for (std::size_t i = c.components.size(); i > 0; --i)
      p += std::to_string(i) + (i > 1 ? "," : "");
    out.push_back({"permute-cons", {r.cons, p}});
  }
  out.push_back({"rename-cons", {r.cons, freshConName(m, r.cons)}});
}

}  // namespace

std::vector<OpInvocation> applicableOps(const Module& input,
                                        const std::optional<FocusTarget>& focus) {
  Module m = stripFocus(input);
  std::vector<OpInvocation> cand;
  if (!focus) {
    cand.push_back({"introduce", {"type " + freshConName(m, "NewType") + " = Int"}});
  } else if (const auto* n = std::get_if<TypeNameSel>(&*focus)) {
    typeNameOps(m, n->type, cand);
  } else if (const auto* r = std::get_if<CompRangeSel>(&*focus)) {
    componentOps(m, *r, cand);
  } else {
    const TypeSel& sel = std::get<TypeSel>(*focus);
    TypeExpr t;
    try {
      t = resolve(m, sel);
    } catch (const Error&) {
      return {};
    }
    std::string at = toString(sel);
    cand.push_back({"unfold-alias", {at}});
    for (const auto& d : m.decls)
      if (d.kind == Decl::Kind::Alias) cand.push_back({"fold-alias", {d.name, "at", at}});
    if (t.isApp()) {
      const Decl* td = m.findType(t.name);
      for (const auto& d : m.decls) {
        if (d.name == t.name || !d.isTypeDecl()) continue;
        if (d.kind == Decl::Kind::Alias)
          cand.push_back({"swap-alias", {t.name, d.name, "at", at}});
        if (d.kind == Decl::Kind::Data && td && td->kind == Decl::Kind::Data &&
            td->conss.size() == d.conss.size()) {
          DataUnifier u{t.name, d.name, {}};
          for (std::size_t i = 0; i < d.conss.size(); ++i)
            u.consPairs.push_back({td->conss[i].name, d.conss[i].name});
          cand.push_back({"swap-data", {printUnifier(u), "at", at}});
        }
      }
      typeNameOps(m, t.name, cand);
    }
    if (sel.kind == TypeSel::Kind::AliasRhs && sel.path.empty())
      cand.push_back({"alias2newtype", {sel.owner, freshConName(m, sel.owner)}});
    if (sel.kind == TypeSel::Kind::ConsComp && sel.path.empty())
      componentOps(m, CompRangeSel{sel.owner, sel.cons, sel.index, 1}, cand);
  }
  std::vector<OpInvocation> out;
  for (const auto& inv : cand) {
    if (std::find(out.begin(), out.end(), inv) != out.end()) continue;
    if (applyOp(m, inv).ok) out.push_back(inv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sessions

Session::Session(Module initial) : initial_(initial), current_(std::move(initial)) {}

void Session::setFocus(std::optional<FocusTarget> f) {
  if (f) {
    if (const auto* s = std::get_if<TypeSel>(&*f)) resolve(current_, *s);
    else if (const auto* r = std::get_if<CompRangeSel>(&*f)) resolveRange(current_, *r);
    else if (!current_.findType(std::get<TypeNameSel>(*f).type))
      fail(ErrorCode::UnknownName, "no type " + std::get<TypeNameSel>(*f).type);
  }
  focus_ = std::move(f);
}

TrafoResult Session::apply(const OpInvocation& inv) {
  if (inv.op == "extract") {
    try {
      return fold(parseExtract(Args{inv}));
    } catch (const Error& e) {
      return TrafoResult::refusal(current_, e);
    }
  }
  return applyScript({inv});
}

TrafoResult Session::applyScript(const Script& s) {
  Module cur = current_;
  std::vector<Entry> added;
  std::vector<StepSummary> steps;
  for (const auto& inv : s) {
    Script parts = {inv};
    if (inv.op == "extract") {
      try {
        parts = expandCompoundFold(cur, parseExtract(Args{inv}));
      } catch (const Error& e) {
        TrafoResult r = TrafoResult::refusal(current_, e);
        r.failedStep = steps.size() + 1;
        r.steps = steps;
        return r;
      }
    }
    for (const auto& p : parts) {
      TrafoResult r = applyOp(cur, p);
      if (!r.ok) {
        r.module = current_;
        r.failedStep = steps.size() + 1;
        r.steps = steps;
        return r;
      }
      added.push_back({cur, p});
      steps.insert(steps.end(), r.steps.begin(), r.steps.end());
      cur = std::move(r.module);
    }
  }
  Module before = stripFocus(current_);
  TrafoResult r = TrafoResult::success(cur);
  r.steps = std::move(steps);
  r.changed = changedLocations(before, cur);
  r.todos = todosSince(cur, nextTodoTag(before));
  history_.insert(history_.end(), added.begin(), added.end());
  current_ = std::move(cur);
  try {
    setFocus(focus_);
  } catch (const Error&) {
    focus_.reset();
  }
  return r;
}

TrafoResult Session::fold(const FoldRequest& req) {
  Script s;
  try {
    s = expandCompoundFold(current_, req);
  } catch (const Error& e) {
    TrafoResult r = TrafoResult::refusal(current_, e);
    r.failedStep = 1;
    return r;
  }
  return applyScript(s);
}

void Session::undo() {
  if (history_.empty()) fail(ErrorCode::EmptyHistory, "nothing to undo");
  current_ = std::move(history_.back().before);
  history_.pop_back();
  try {
    setFocus(focus_);
  } catch (const Error&) {
    focus_.reset();
  }
}

Module Session::replay() const {
  Module m = initial_;
  for (const auto& e : history_) {
    TrafoResult r = applyOp(m, e.inv);
    if (!r.ok) throw Error(r.code, r.detail, r.locations);
    m = std::move(r.module);
  }
  return m;
}

std::vector<TodoMarker> Session::todos() const { return todoMarkers(current_); }

}  // namespace dtr
