// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dtr/concrete.hpp"
#include "dtr/datatype_ops.hpp"
#include "dtr/engine.hpp"
#include "dtr/evaluator.hpp"
#include "dtr/focus.hpp"
#include "dtr/program_lift.hpp"
#include "dtr/service.hpp"
#include "generator.hpp"
#include "test_util.hpp"

using namespace dtr;
using test::readSample;
using test::sample;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
  std::vector<std::string> problems;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (problems.size() < 12) problems.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string evalText(const Module& m, const std::string& e) {
  try {
    return printValue(eval(m, e));
  } catch (const Error& x) {
    return std::string("<") + std::string(codeName(x.code())) + ">";
  }
}

// ---------------------------------------------------------------------------
// 1: cons lists become snoc lists

// Expected value after the transformation: Cons x xs becomes Snoc xs' x.
Value toSnoc(const Value& v) {
  Value r = v;
  for (auto& i : r.items) i = toSnoc(i);
  if (v.kind == Value::Kind::Con && v.name == "Nil") r.name = "Lin";
  if (v.kind == Value::Kind::Con && v.name == "Cons") {
    r.name = "Snoc";
    std::swap(r.items[0], r.items[1]);
  }
  return r;
}

Outcome criterion1() {
  Outcome o;
  Module m = sample("conslist.mf");
  auto t0 = Clock::now();
  TrafoResult r = runScript(m, parseScript(readSample("snoclist.trafo")));
  double secs = secondsSince(t0);
  o.check(r.ok, "script refused: " + r.detail);
  if (!r.ok) return o;
  const Decl* d = r.module.findType("SnocList");
  o.check(d && alphaEq(Module{{*d}},
                       parseModule("data SnocList a = Lin | Snoc (SnocList a) a;")),
          "SnocList declaration differs");
  o.check(!r.module.findType("ConsList"), "ConsList still declared");
  // probes written against each version's names
  std::vector<std::pair<std::string, std::string>> probes = {
      {"len sample", "len sample"},
      {"sum sample", "sum sample"},
      {"sample", "sample"},
      {"fromList [4, 5, 6]", "fromList [4, 5, 6]"},
      {"sum (fromList [10, 20])", "sum (fromList [10, 20])"},
      {"firstOr 0 sample", "firstOr 0 sample"},
      {"firstOr 7 Nil", "firstOr 7 Lin"},
      {"len (Cons 1 Nil)", "len (Snoc Lin 1)"},
  };
  for (const auto& [before, after] : probes) {
    Value vb = eval(m, before), va = eval(r.module, after);
    o.check(toSnoc(vb) == va, before + ": " + printValue(vb) + " vs " + printValue(va));
  }
  o.check(secs < 1.0, "took " + std::to_string(secs) + " s");
  o.note = std::to_string(probes.size()) + " probes, " + std::to_string(secs * 1000) + " ms";
  return o;
}

// ---------------------------------------------------------------------------
// 2: block extraction

Outcome criterion2() {
  Outcome o;
  Module m = sample("interp.mf");
  auto t0 = Clock::now();
  TrafoResult r = runScript(m, parseScript(readSample("extract_block.trafo")));
  double secs = secondsSince(t0);
  o.check(r.ok, "script refused: " + r.detail);
  if (!r.ok) return o;
  const Decl* prog = r.module.findType("Prog");
  const Decl* block = r.module.findType("Block");
  o.check(prog && printDecl(*prog) == "data Prog = Prog Name Block;", "Prog differs");
  o.check(block && printDecl(*block) == "data Block = Block [Dec] [Stat];", "Block differs");
  Module expected = parseModule(
      "type Name = String; data Dec = D; data Stat = S;"
      "data Prog = Prog Name Block; data Block = Block [Dec] [Stat];");
  o.check(prog && block &&
              alphaEq(Module{{*prog, *block}},
                      Module{{*expected.findType("Prog"), *expected.findType("Block")}}),
          "not alpha-equivalent to the expected declarations");

  // sample programs, each written for both versions; final values of x and y
  // are computed by hand
  struct Case {
    std::string decs, stats;
    long long x, y;
  };
  std::vector<Case> cases = {
      {"[Dec \"x\" IntType, Dec \"y\" IntType]",
       "[Assign \"x\" (Lit 1), Assign \"y\" (Add (Var \"x\") (Lit 41)), Print (Var \"y\")]", 1, 42},
      {"[]", "[]", 0, 0},
      {"[Dec \"x\" IntType]", "[Assign \"x\" (Lit 5), Assign \"x\" (Add (Var \"x\") (Var \"x\"))]", 10, 0},
      {"[Dec \"y\" BoolType]", "[Assign \"y\" (Add (Lit 2) (Lit 3)), Print (Lit 0), Assign \"x\" (Var \"y\")]", 5, 5},
  };
  for (const auto& c : cases) {
    for (const char* var : {"x", "y"}) {
      std::string tail = std::string(" s0 \"") + var + "\"";
      std::string before = "run (Prog \"p\" " + c.decs + " " + c.stats + ")" + tail;
      std::string after = "run (Prog \"p\" (Block " + c.decs + " " + c.stats + "))" + tail;
      std::string vb = evalText(m, before), va = evalText(r.module, after);
      std::string expect = std::to_string(std::string(var) == "x" ? c.x : c.y);
      o.check(vb == expect && va == expect, after + ": " + vb + " / " + va + ", expected " + expect);
    }
  }
  o.check(evalText(m, "run sample s0 \"y\"") == evalText(r.module, "run sample s0 \"y\""),
          "run sample differs");
  o.check(secs < 1.0, "took " + std::to_string(secs) + " s");
  o.note = std::to_string(cases.size() * 2 + 1) + " run probes, " + std::to_string(secs * 1000) + " ms";
  return o;
}

// ---------------------------------------------------------------------------
// 3: optional successors become lists

Outcome criterion3() {
  Outcome o;
  // every relation over states {0,1,2}: each state has no successor or one
  std::ostringstream rels;
  std::vector<std::vector<int>> table;  // -1 means no successor
  for (int k = 0; k < 64; ++k) {
    std::vector<int> row;
    rels << "rel" << k << " :: TransRel Int;\n";
    for (int s = 0; s < 3; ++s) {
      int code = (k >> (2 * s)) & 3;  // 0: none, 1..3: successor code-1
      row.push_back(code == 0 ? -1 : code - 1);
      rels << "rel" << k << " " << s << " = "
           << (code == 0 ? std::string("Nothing") : "Just " + std::to_string(code - 1)) << ";\n";
    }
    table.push_back(row);
  }
  Module m = parseModule(readSample("trans.mf") + "\n" + rels.str());
  auto t0 = Clock::now();
  TrafoResult r = runScript(m, parseScript(readSample("maybe2list.trafo")));
  double secs = secondsSince(t0);
  o.check(r.ok, "script refused: " + r.detail);
  if (!r.ok) return o;
  const Decl* tr = r.module.findType("TransRel");
  o.check(tr && printDecl(*tr) == "type TransRel a = a -> ConsList a;", "TransRel not generalised");
  for (const char* f : {"toMaybe", "fromMaybe", "toMaybe'", "fromMaybe'"})
    o.check(r.module.findFun(f) && r.module.findSig(f), std::string("mediator ") + f + " missing");

  std::size_t probes = 0;
  for (int k = 0; k < 64; ++k)
    for (int s = 0; s < 3; ++s) {
      std::string p = "deadEnd rel" + std::to_string(k) + " " + std::to_string(s);
      std::string expect = table[k][s] < 0 ? "True" : "False";
      std::string vb = evalText(m, p), va = evalText(r.module, p);
      o.check(vb == expect && va == expect, p + ": " + vb + " / " + va);
      ++probes;
    }
  for (const char* rel : {"loop", "counter"})
    for (int s = 0; s < 3; ++s) {
      std::string p = std::string("deadEnd ") + rel + " " + std::to_string(s);
      o.check(evalText(m, p) == evalText(r.module, p), p);
      ++probes;
    }
  // mediators round-trip every Maybe Int value of depth <= 3 over {0,1,2}
  for (const char* v : {"Nothing", "Just 0", "Just 1", "Just 2"}) {
    std::string p = std::string("toMaybe (toMaybe' (fromMaybe' (fromMaybe (") + v + "))))";
    o.check(evalText(r.module, p) == evalText(r.module, v), p);
    ++probes;
  }
  o.note = std::to_string(probes) + " probes over 64 relations, " +
           std::to_string(secs * 1000) + " ms";
  return o;
}

// ---------------------------------------------------------------------------
// Helpers for generated modules

std::string typeOfCons(const test::GenInfo& g, const std::string& cons) {
  for (const auto& d : g.datas)
    for (const auto& c : d.conss)
      if (c.name == cons) return d.name;
  return "";
}

// Drops the conversion functions a swap leaves behind.
Module withoutMediators(const Module& m, const std::set<Name>& types) {
  Module out;
  for (const auto& d : m.decls) {
    bool mediator = false;
    for (const auto& t : types)
      mediator = mediator || d.name == toMediatorName(t) || d.name == fromMediatorName(t);
    if (d.isTypeDecl() || !mediator) out.decls.push_back(d);
  }
  return out;
}

// Copy of data type `d` under a new name with primed constructors.
std::string twinData(const Module& m, const test::GenInfo::Data& d, const std::string& twin,
                     std::string& unifier) {
  Decl copy = *m.findType(d.name);
  copy.name = twin;
  std::map<Name, Name> cs;
  unifier = "unifier(" + d.name + "=" + twin + ";";
  for (std::size_t i = 0; i < copy.conss.size(); ++i) {
    Name nn = copy.conss[i].name + "X";
    unifier += (i ? ", " : " ") + copy.conss[i].name + "=" + nn;
    copy.conss[i].name = nn;
  }
  unifier += ")";
  std::function<void(TypeExpr&)> ren = [&](TypeExpr& t) {
    if (t.isApp() && t.name == d.name) t.name = twin;
    for (auto& a : t.args) ren(a);
  };
  for (auto& c : copy.conss)
    for (auto& t : c.components) ren(t);
  return printDecl(copy);
}

// ---------------------------------------------------------------------------
// 4: inverse pairs

Outcome criterion4() {
  Outcome o;
  const std::size_t kModules = 240;
  std::map<std::string, std::size_t> runs;
  std::size_t failures = 0;
  std::mt19937_64 rng(4242);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  for (std::size_t seed = 1; seed <= kModules; ++seed) {
    test::Generated g = test::generateModule(seed);
    Module m;
    try {
      m = parseModule(g.text);
    } catch (const Error& e) {
      o.check(false, "seed " + std::to_string(seed) + " does not parse: " + e.detail());
      continue;
    }
    auto pair = [&](const std::string& name, const Module& start, const std::string& fwd,
                    const std::string& back, const std::set<Name>& swapped = {}) {
      ++runs[name];
      TrafoResult a = applyOp(start, parseInvocation(fwd));
      if (!a.ok) {
        ++failures;
        o.check(false, "seed " + std::to_string(seed) + " " + fwd + ": " +
                           std::string(codeName(a.code)) + " " + a.detail);
        return;
      }
      TrafoResult b = applyOp(a.module, parseInvocation(back));
      bool same = b.ok && alphaEq(withoutMediators(b.module, swapped), start);
      if (!same) {
        ++failures;
        o.check(false, "seed " + std::to_string(seed) + " " + fwd + " ; " + back +
                           (b.ok ? " differs" : ": " + std::string(codeName(b.code)) + " " + b.detail));
      }
    };

    // fold then unfold at every literal alias site, and the other way round
    for (std::size_t k = 0; k < g.info.aliases.size(); ++k) {
      const auto& [cons, idx] = g.info.literalAliasSites[k];
      std::string sel = "cons:" + typeOfCons(g.info, cons) + "." + cons + "/" + std::to_string(idx);
      pair("unfold.fold", m, "fold-alias alias:" + g.info.aliases[k] + " at " + sel,
           "unfold-alias " + sel);
    }
    pair("eliminate.introduce", m, "introduce \"data Zz a = Zz a | Zy (Zz a)\"", "eliminate Zz");
    // group then ungroup on a constructor with two or more components
    for (const auto& d : g.info.datas)
      for (const auto& c : d.conss)
        if (c.arity >= 2) {
          std::size_t s = pick(1, c.arity - 1), e = pick(s + 1, c.arity);
          std::string base = "cons:" + d.name + "." + c.name + "/";
          pair("ungroup.group", m,
               "group " + base + std::to_string(s) + ".." + std::to_string(e),
               "ungroup " + base + std::to_string(s));
        }
    for (const auto& a : g.info.aliases)
      pair("newtype2alias.alias2newtype", m, "alias2newtype " + a + " Mk" + a,
           "newtype2alias " + a);
    pair("data2newtype.newtype2data", m, "newtype2data W", "data2newtype W");
    for (const auto& d : g.info.datas) {
      std::size_t pos = pick(1, d.conss.size() + 1);
      pair("exclude.include", m,
           "include " + d.name + " \"Zc Int [String]\" " + std::to_string(pos), "exclude Zc");
      const auto& c = d.conss[pick(0, d.conss.size() - 1)];
      std::size_t i = pick(1, c.arity + 1);
      pair("delete.insert", m, "insert " + c.name + " " + std::to_string(i) + " \"[Int]\"",
           "delete " + c.name + " " + std::to_string(i));
    }
    // swapping aliases with equal right-hand sides
    {
      const std::string& a = g.info.aliases.front();
      const Decl* ad = m.findType(a);
      Module twin = applyOp(m, parseInvocation("introduce \"type Twin = " +
                                                printType(ad->type) + "\"")).module;
      std::string sel = "sig:use" + a + "/type/path:1";
      pair("swap.swap", twin, "swap-alias " + a + " Twin at " + sel,
           "swap-alias Twin " + a + " at " + sel);
    }
    // swapping a data type with an isomorphic copy and back; the generated
    // mediators are not part of the comparison
    {
      const auto& d = g.info.datas[pick(0, g.info.datas.size() - 1)];
      std::string u;
      std::string decl = twinData(m, d, "Tw", u);
      TrafoResult t = applyOp(m, parseInvocation("introduce \"" + decl + "\""));
      o.check(t.ok, "seed " + std::to_string(seed) + " twin: " + t.detail);
      if (t.ok) {
        std::string inv = "unifier(Tw=" + d.name + ";";
        const Decl* td = t.module.findType(d.name);
        for (std::size_t i = 0; i < td->conss.size(); ++i)
          inv += (i ? ", " : " ") + td->conss[i].name + "X=" + td->conss[i].name;
        inv += ")";
        std::string sel = "sig:use" + d.name + "/type/path:1";
        pair("swap.swap", t.module, "swap-data " + u + " at " + sel,
             "swap-data " + inv + " at " + sel, {d.name, "Tw"});
      }
    }
  }
  std::size_t total = 0;
  std::ostringstream note;
  for (const auto& [k, n] : runs) {
    note << k << "=" << n << " ";
    total += n;
  }
  for (const char* k : {"unfold.fold", "eliminate.introduce", "ungroup.group",
                        "newtype2alias.alias2newtype", "data2newtype.newtype2data",
                        "exclude.include", "delete.insert", "swap.swap"})
    o.check(runs[k] > 0, std::string("pair ") + k + " never ran");
  o.note = std::to_string(kModules) + " modules, " + std::to_string(total) + " pairs, " +
           std::to_string(failures) + " failures; " + note.str();
  return o;
}

// ---------------------------------------------------------------------------
// 5: structure preservation

// Independent expansion: aliases are substituted, newtypes unwrapped, data
// types unrolled into constructor sums to the given depth.
class Expander {
 public:
  explicit Expander(const Module& m) : m_(m) {}

  std::string expand(const TypeExpr& t, int depth) const {
    switch (t.kind) {
      case TypeExpr::Kind::Focus: return expand(t.args[0], depth);
      case TypeExpr::Kind::Var: return "'" + t.name;
      case TypeExpr::Kind::List: return "[" + expand(t.args[0], depth) + "]";
      case TypeExpr::Kind::Fun:
        return "(" + expand(t.args[0], depth) + " -> " + expand(t.args[1], depth) + ")";
      case TypeExpr::Kind::Tuple: {
        std::string s = "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + expand(t.args[i], depth);
        return s + ")";
      }
      case TypeExpr::Kind::App:
      case TypeExpr::Kind::FocusName: break;
    }
    const Decl* d = nullptr;
    for (const auto& x : m_.decls)
      if (x.isTypeDecl() && x.name == t.name) d = &x;
    if (!d) {
      std::string s = t.name;
      for (const auto& a : t.args) s += " " + expand(a, depth);
      return t.args.empty() ? s : "(" + s + ")";
    }
    std::map<Name, TypeExpr> sub;
    for (std::size_t i = 0; i < d->params.size() && i < t.args.size(); ++i)
      sub[d->params[i]] = t.args[i];
    if (d->kind == Decl::Kind::Alias) return expand(substitute(d->type, sub), depth);
    if (depth == 0) return "...";
    if (d->kind == Decl::Kind::Newtype)
      return expand(substitute(d->conss[0].components[0], sub), depth - 1);
    std::string s = "{";
    for (std::size_t i = 0; i < d->conss.size(); ++i) {
      s += (i ? " | " : "") + rename(d->conss[i].name);
      for (std::size_t j : order(d->conss[i])) {
        s += " " + expand(substitute(d->conss[i].components[j], sub), depth - 1);
      }
    }
    return s + "}";
  }

  // Subjects: every type declaration applied to its parameters, and every
  // signature.
  std::map<std::string, std::string> subjects(int depth,
                                              const std::map<Name, Name>& typeNames = {}) const {
    std::map<std::string, std::string> out;
    for (const auto& d : m_.decls) {
      if (d.kind == Decl::Kind::Sig) {
        out["sig " + d.name] = expand(d.type, depth);
      } else if (d.isTypeDecl()) {
        std::vector<TypeExpr> ps;
        for (const auto& p : d.params) ps.push_back(TypeExpr::var(p));
        auto it = typeNames.find(d.name);
        out["type " + (it == typeNames.end() ? d.name : it->second)] =
            expand(TypeExpr::app(d.name, ps), depth);
      }
    }
    return out;
  }

  std::map<Name, Name> consNames;                        // label renaming
  std::map<Name, std::vector<std::size_t>> consOrder;    // component reordering

 private:
  static TypeExpr substitute(const TypeExpr& t, const std::map<Name, TypeExpr>& sub) {
    if (t.kind == TypeExpr::Kind::Var) {
      auto it = sub.find(t.name);
      return it == sub.end() ? t : it->second;
    }
    TypeExpr r = t;
    for (auto& a : r.args) a = substitute(a, sub);
    return r;
  }
  std::string rename(const Name& c) const {
    auto it = consNames.find(c);
    return it == consNames.end() ? c : it->second;
  }
  std::vector<std::size_t> order(const ConsDecl& c) const {
    auto it = consOrder.find(c.name);
    if (it != consOrder.end()) return it->second;
    std::vector<std::size_t> o(c.components.size());
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = i;
    return o;
  }

  const Module& m_;
};

Outcome criterion5() {
  Outcome o;
  const int kDepth = 5;
  const std::size_t kModules = 200;
  std::map<std::string, std::size_t> runs;
  std::size_t failures = 0;
  std::mt19937_64 rng(5555);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  for (std::size_t seed = 1000; seed < 1000 + kModules; ++seed) {
    test::Generated g = test::generateModule(seed);
    Module m = parseModule(g.text);

    // `prepare` installs the operator's mapping on the expanders of the input
    // and the result, after which their subjects must agree; only subjects
    // present in both count.
    using Prepare = std::function<void(Expander&, Expander&, std::map<Name, Name>&)>;
    auto preserve = [&](const std::string& name, const Module& start, const std::string& line,
                        Prepare prepare = {}) {
      ++runs[name];
      TrafoResult r = applyOp(start, parseInvocation(line));
      if (!r.ok) {
        ++failures;
        o.check(false, "seed " + std::to_string(seed) + " " + line + ": " + r.detail);
        return;
      }
      Expander before(start), after(r.module);
      std::map<Name, Name> typeNames;
      if (prepare) prepare(before, after, typeNames);
      auto sb = before.subjects(kDepth);
      auto sa = after.subjects(kDepth, typeNames);
      std::size_t common = 0;
      for (const auto& [k, v] : sb) {
        auto it = sa.find(k);
        if (it == sa.end()) continue;
        ++common;
        if (it->second != v) {
          ++failures;
          o.check(false, "seed " + std::to_string(seed) + " " + line + ": " + k + "\n    " + v +
                             "\n    " + it->second);
          return;
        }
      }
      if (common == 0) {
        ++failures;
        o.check(false, "seed " + std::to_string(seed) + " " + line + ": nothing compared");
      }
    };

    const auto& d = g.info.datas[pick(0, g.info.datas.size() - 1)];
    preserve("rename-type", m, "rename-type " + d.name + " Renamed",
             [&](Expander&, Expander&, std::map<Name, Name>& tn) { tn["Renamed"] = d.name; });
    const auto& c = d.conss[pick(0, d.conss.size() - 1)];
    preserve("rename-cons", m, "rename-cons " + c.name + " Renamed",
             [&](Expander&, Expander& e, std::map<Name, Name>&) { e.consNames["Renamed"] = c.name; });
    if (d.params >= 2)
      preserve("permute-params", m, "permute-params " + d.name + " 2,1");
    if (c.arity >= 2) {
      std::vector<std::size_t> p(c.arity);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
      std::shuffle(p.begin(), p.end(), rng);
      std::string ps;
      for (std::size_t i = 0; i < p.size(); ++i) ps += (i ? "," : "") + std::to_string(p[i] + 1);
      // new component i is old component p[i]; listing the new ones in the
      // order of the old ones reproduces the input
      std::vector<std::size_t> inv(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
      preserve("permute-cons", m, "permute-cons " + c.name + " " + ps,
               [&](Expander&, Expander& e, std::map<Name, Name>&) { e.consOrder[c.name] = inv; });
    }
    preserve("introduce", m, "introduce \"data Fresh = Fresh [Int] | Other; type Al9 = Fresh\"");
    Module withFresh = parseModule(g.text + "\ndata Fresh = Fresh Int;\n");
    preserve("eliminate", withFresh, "eliminate Fresh");
    for (std::size_t k = 0; k < g.info.aliases.size(); ++k) {
      const auto& [cons, idx] = g.info.literalAliasSites[k];
      std::string sel = "cons:" + typeOfCons(g.info, cons) + "." + cons + "/" + std::to_string(idx);
      preserve("fold", m, "fold-alias alias:" + g.info.aliases[k] + " at " + sel);
      Module folded = applyOp(m, parseInvocation("fold-alias alias:" + g.info.aliases[k] + " at " + sel)).module;
      preserve("unfold", folded, "unfold-alias " + sel);
    }
    {
      const std::string& a = g.info.aliases.front();
      Module twin = parseModule(g.text + "\ntype Twin = " + printType(m.findType(a)->type) + ";\n");
      preserve("swap-alias", twin, "swap-alias " + a + " Twin at sig:use" + a + "/type/path:1");
    }
    {
      std::string u;
      std::string decl = twinData(m, d, "Tw", u);
      Module twin = parseModule(g.text + "\n" + decl + "\n");
      preserve("swap-data", twin, "swap-data " + u + " at sig:use" + d.name + "/type/path:1",
               [&](Expander& b, Expander& a, std::map<Name, Name>&) {
                 for (const auto& k : d.conss) {
                   b.consNames[k.name + "X"] = k.name;
                   a.consNames[k.name + "X"] = k.name;
                 }
               });
    }
  }
  std::ostringstream note;
  for (const auto& [k, n] : runs) note << k << "=" << n << " ";
  o.note = std::to_string(kModules) + " modules, depth " + std::to_string(kDepth) + ", " +
           std::to_string(failures) + " failures; " + note.str();
  return o;
}

// ---------------------------------------------------------------------------
// 6: refusal soundness

struct Witness {
  ErrorCode code;
  std::string module;  // source text; empty for API witnesses without one
  std::function<void(const Module&)> act;
};

Outcome criterion6() {
  Outcome o;
  const std::string base =
      "data T = A Int Int | B; data U = U T; newtype N = N Int;"
      "type S = (Int, Int); type S2 = (Int, Int); type S3 = Int;"
      "type P a = (a, a);"
      "data Maybe a = Nothing | Just a; data M2 a = N2 | J2 a; data M3 a = N3 | J3 a a;"
      "f :: T -> Int; f (A x y) = x; f B = 0;"
      "g :: S -> Int; g p = 0;"
      "h :: [Maybe Int] -> Int; h xs = 0;"
      "k :: Maybe Int -> Int; k m = 0;";
  auto op = [](const std::string& line) {
    return [line](const Module& m) {
      TrafoResult r = applyOp(m, parseInvocation(line));
      if (!r.ok) throw Error(r.code, r.detail, r.locations);
    };
  };
  std::vector<Witness> ws = {
      {ErrorCode::SyntaxError, base, op("introduce \"data = \"")},
      {ErrorCode::DuplicateName, base, op("introduce \"data Q a a = Q a\"")},
      {ErrorCode::ArityMismatch, "", [](const Module&) { parseModule("data T = A Int; f (A) = 0;"); }},
      {ErrorCode::IllFormed, base, op("introduce \"data Q = Q Nope\"")},
      {ErrorCode::UnknownType, base, [](const Module& m) { constructorsOf(m, "Nope"); }},
      {ErrorCode::UnknownName, base, op("rename-type Nope X")},
      {ErrorCode::KindMismatch, base, op("unfold-alias alias:N/rhs")},
      {ErrorCode::BadPath, base, op("unfold-alias cons:T.A/1/path:1")},
      {ErrorCode::BadIndex, base, op("unfold-alias cons:T.A/5")},
      {ErrorCode::NoFocus, base, [](const Module& m) { focusToSelector(m); }},
      {ErrorCode::MultipleFoci, "",
       [](const Module&) { parseModule("data T = A {!Int!} | B {!Int!};"); }},
      {ErrorCode::AlreadyFocused, "data T = A {!Int!} Int;",
       [](const Module& m) { selectorToFocus(m, parseFocusTarget("cons:T.A/2")); }},
      {ErrorCode::NameClash, base, op("rename-type T U")},
      {ErrorCode::BadPermutation, base, op("permute-cons A 1,1")},
      {ErrorCode::StillReferenced, base, op("eliminate T")},
      {ErrorCode::NotAnAlias, base, op("fold-alias alias:T at cons:U.U/1")},
      {ErrorCode::RhsMismatch, base, op("fold-alias alias:S at cons:T.A/1")},
      {ErrorCode::BadArgMap, "type P a = (a, a); data T = T (Int, Int);",
       op("fold-alias alias:P at cons:T.T/1 with a=3")},
      {ErrorCode::NotAliasApplication, base, op("unfold-alias cons:T.A/1")},
      {ErrorCode::BadRange, base, op("group cons:T.A/2..3")},
      {ErrorCode::NotATuple, base, op("ungroup cons:N.N/1")},
      {ErrorCode::NotANewtype, base, op("newtype2data S")},
      {ErrorCode::NotConvertibleToNewtype, base, op("data2newtype T")},
      {ErrorCode::NotEquivalent, base, op("swap-alias S S3 at sig:g/type/path:1")},
      {ErrorCode::NotAnApplicationOfOld, base, op("swap-alias S2 S at sig:g/type/path:1")},
      {ErrorCode::UnifierInvalid, base,
       op("swap-data unifier(Maybe=M3; Nothing=N3, Just=J3) at sig:k/type/path:1")},
      {ErrorCode::NotAData, base, op("include N \"K\"")},
      {ErrorCode::UnboundTypeVar, base, op("include T \"K a\"")},
      {ErrorCode::LastConstructor, base, op("exclude U")},
      {ErrorCode::NotADataOrNewtypeCons, base, op("insert Nope 1 \"Int\"")},
      {ErrorCode::NotANewtypeTarget, base, op("insert N 1 \"Int\"")},
      {ErrorCode::UnsaturatedUntuplable,
       "data T = A (Int, Int) | B; f :: T -> Int; f (A p) = 0; f B = 1;"
       "g :: Int -> T; g x = primHead (primMap A [(1, 2)]);",
       op("ungroup cons:T.A/1")},
      {ErrorCode::UnsignedFunctionUsesType,
       "type S = Int; f :: S -> Int; f x = x; g y = f y;", op("alias2newtype S S")},
      {ErrorCode::NestedOccurrenceUnsupported, base,
       op("swap-data unifier(Maybe=M2; Nothing=N2, Just=J2) at sig:h/type/path:1.1")},
      {ErrorCode::WouldEmptyFunction,
       "data T = A Int | B; f :: T -> Int; f (A n) = n;", op("exclude A")},
      {ErrorCode::BadArguments, base, op("rename-type T")},
      {ErrorCode::EmptyHistory, base, [](const Module& m) { Session(m).undo(); }},
      {ErrorCode::HitBottom, base, [](const Module& m) { eval(m, "undefined"); }},
      {ErrorCode::PatternMatchFailure, "data T = A | B; f A = 1;",
       [](const Module& m) { eval(m, "f B"); }},
      {ErrorCode::Unbound, base, [](const Module& m) { eval(m, "nope"); }},
      {ErrorCode::FuelExhausted, "loop x = loop x;",
       [](const Module& m) { eval(m, "loop 0", 500); }},
  };

  std::set<ErrorCode> covered;
  for (const auto& w : ws) {
    std::string name(codeName(w.code));
    Module m = w.module.empty() ? Module{} : parseModule(w.module);
    std::string before = printModule(m);
    ErrorCode got{};
    bool threw = false;
    try {
      w.act(m);
    } catch (const Error& e) {
      threw = true;
      got = e.code();
    }
    o.check(threw, name + ": witness did not fail");
    o.check(!threw || got == w.code, name + ": got " + std::string(codeName(got)));
    o.check(printModule(m) == before, name + ": module changed");
    if (threw && got == w.code) covered.insert(w.code);
  }
  // applyOp refusals return the input module itself
  Module bm = parseModule(base);
  for (const char* line : {"eliminate T", "exclude U", "rename-type T U", "data2newtype T"}) {
    TrafoResult r = applyOp(bm, parseInvocation(line));
    o.check(!r.ok && printModule(r.module) == printModule(bm),
            std::string(line) + ": refusal did not keep the module");
  }
  for (ErrorCode c : kAllErrorCodes)
    o.check(covered.count(c), std::string("no witness for ") + std::string(codeName(c)));
  o.note = std::to_string(covered.size()) + "/" + std::to_string(kAllErrorCodes.size()) +
           " codes witnessed";
  return o;
}

// ---------------------------------------------------------------------------
// 7: to-do markers after including a constructor

bool patternMentions(const Pattern& p, const std::set<Name>& cs) {
  if (p.kind == Pattern::Kind::Con && cs.count(p.name)) return true;
  for (const auto& a : p.args)
    if (patternMentions(a, cs)) return true;
  return false;
}

bool exprDiscriminates(const Expr& e, const std::set<Name>& cs) {
  for (const auto& a : e.alts)
    if (patternMentions(a.pat, cs) || exprDiscriminates(a.rhs, cs)) return true;
  for (const auto& k : e.kids)
    if (exprDiscriminates(k, cs)) return true;
  return false;
}

// A closed expression of the given type in the interpreter module; the
// extended type gets the new constructor.
std::string valueFor(const TypeExpr& t) {
  if (t.kind == TypeExpr::Kind::List) return "[]";
  if (t.kind == TypeExpr::Kind::Fun) return "(\\z -> " + valueFor(t.args[1]) + ")";
  if (t.name == "Int") return "0";
  if (t.name == "Name" || t.name == "String") return "\"x\"";
  if (t.name == "State") return "s0";
  if (t.name == "Stat") return "(Block [])";
  if (t.name == "Expr") return "(Lit 0)";
  if (t.name == "Prog") return "sample";
  return "undefined";
}

std::string patternValue(const Pattern& p, const TypeExpr& t) {
  if (p.kind == Pattern::Kind::Con) {
    std::string s = "(" + p.name;
    for (const auto& a : p.args) s += " " + patternValue(a, TypeExpr::app("Int"));
    return s + ")";
  }
  return valueFor(t);
}

Outcome criterion7() {
  Outcome o;
  Module m = sample("interp.mf");
  std::set<Name> statCons;
  for (const auto& c : m.findType("Stat")->conss) statCons.insert(c.name);
  std::set<Name> discriminating;
  for (const auto& d : m.decls) {
    if (d.kind != Decl::Kind::Fun) continue;
    for (const auto& eq : d.equations) {
      bool hit = exprDiscriminates(eq.rhs, statCons);
      for (const auto& p : eq.patterns) hit = hit || patternMentions(p, statCons);
      if (hit) discriminating.insert(d.name);
    }
  }

  TrafoResult r = applyOp(m, parseInvocation("include Stat \"Block [Stat]\""));
  o.check(r.ok, "include refused: " + r.detail);
  if (!r.ok) return o;
  o.check(r.todos.size() == discriminating.size(),
          std::to_string(r.todos.size()) + " markers for " +
              std::to_string(discriminating.size()) + " discriminating functions");
  o.check(todoMarkers(r.module) == r.todos, "registry disagrees with the module");
  std::set<Name> marked;
  for (const auto& t : r.todos) marked.insert(t.fun);
  o.check(marked == discriminating, "markers are not one per discriminating function");

  std::size_t forced = 0;
  for (const auto& t : r.todos) {
    const Decl* f = r.module.findFun(t.fun);
    const Decl* sig = r.module.findSig(t.fun);
    const Equation& eq = f->equations[t.equation - 1];
    // argument types from the signature, aliases expanded at the head
    std::vector<TypeExpr> doms;
    TypeExpr cur = sig->type;
    for (;;) {
      TypeExpr e = expandHead(r.module, cur);
      if (e.kind != TypeExpr::Kind::Fun) break;
      doms.push_back(cur.kind == TypeExpr::Kind::Fun ? cur.args[0] : e.args[0]);
      cur = cur.kind == TypeExpr::Kind::Fun ? cur.args[1] : e.args[1];
    }
    std::string call = t.fun;
    for (std::size_t i = 0; i < doms.size(); ++i) {
      if (i < eq.patterns.size()) call += " " + patternValue(eq.patterns[i], doms[i]);
      else call += " " + valueFor(doms[i]);
    }
    unsigned tag = resolveTodo(r.module, t).todo;
    try {
      Value v = eval(r.module, call);
      o.check(false, toString(t) + ": " + call + " gave " + printValue(v));
    } catch (const Error& e) {
      bool ok = e.code() == ErrorCode::HitBottom &&
                e.detail().find("#" + std::to_string(tag)) != std::string::npos;
      o.check(ok, toString(t) + ": " + call + " gave " + std::string(codeName(e.code())) + " " + e.detail());
      if (ok) ++forced;
    }
  }
  o.note = std::to_string(r.todos.size()) + " markers, " + std::to_string(discriminating.size()) +
           " discriminating functions, " + std::to_string(forced) + " forced to HitBottom";
  return o;
}

// ---------------------------------------------------------------------------
// 8: printing round trip

Outcome criterion8() {
  Outcome o;
  std::size_t corpus = 0;
  for (const auto& entry : std::filesystem::directory_iterator(DTR_SAMPLES)) {
    if (entry.path().extension() != ".mf") continue;
    Module m = sample(entry.path().filename().string());
    std::string text = printModule(m);
    Module back = parseModule(text);
    o.check(alphaEq(back, m), entry.path().filename().string() + " does not round-trip");
    o.check(printModule(back) == text, entry.path().filename().string() + " printing is unstable");
    ++corpus;
  }
  // scenario results and focused modules belong to the corpus as well
  std::vector<Module> extra = {
      runScript(sample("conslist.mf"), parseScript(readSample("snoclist.trafo"))).module,
      runScript(sample("interp.mf"), parseScript(readSample("extract_block.trafo"))).module,
      runScript(sample("trans.mf"), parseScript(readSample("maybe2list.trafo"))).module,
      applyOp(sample("interp.mf"), parseInvocation("include Stat \"Skip\"")).module,
      selectorToFocus(sample("interp.mf"), parseFocusTarget("cons:Prog.Prog/2..3")),
      selectorToFocus(sample("trans.mf"), parseFocusTarget("alias:TransRel/rhs/path:2")),
  };
  for (const auto& m : extra) {
    o.check(alphaEq(parseModule(printModule(m)), m), "derived module does not round-trip");
    o.check(countFoci(parseModule(printModule(m))) == countFoci(m), "focus lost in printing");
    ++corpus;
  }
  const std::size_t kGenerated = 500;
  for (std::size_t seed = 7000; seed < 7000 + kGenerated; ++seed) {
    test::Generated g = test::generateModule(seed);
    try {
      Module m = parseModule(g.text);
      std::string text = printModule(m);
      o.check(alphaEq(parseModule(text), m), "seed " + std::to_string(seed) + " does not round-trip");
    } catch (const Error& e) {
      o.check(false, "seed " + std::to_string(seed) + ": " + e.detail());
    }
  }
  o.note = std::to_string(corpus) + " corpus modules, " + std::to_string(kGenerated) + " generated";
  return o;
}

// ---------------------------------------------------------------------------
// 9: HTTP service

Outcome criterion9() {
  using nlohmann::json;
  Outcome o;
  RefactorService service;
  HttpServer server(service);
  int port = server.start("127.0.0.1", 0);
  o.check(port > 0, "server did not start");
  if (port <= 0) return o;
  httplib::Client client("127.0.0.1", port);
  auto source = [&](const std::string& id) {
    auto r = client.Get("/session/" + id + "/source");
    return r ? json::parse(r->body)["source"].get<std::string>() : std::string("<no reply>");
  };
  auto post = [&](const std::string& path, const json& body) -> std::pair<int, json> {
    auto r = client.Post(path, body.dump(), "application/json");
    if (!r) return {0, nullptr};
    return {r->status, json::parse(r->body)};
  };

  struct Plan {
    std::string sample;
    std::vector<std::string> steps;
    std::vector<std::string> refusals;
  };
  std::vector<Plan> plans = {
      {"conslist.mf",
       {"rename-type ConsList SnocList", "rename-cons Nil Lin", "rename-cons Cons Snoc",
        "permute-cons Snoc 2,1"},
       {"eliminate SnocList", "rename-cons Nope X", "permute-cons Snoc 1,1"}},
      {"interp.mf",
       {"group cons:Prog.Prog/2..3", "introduce \"type Block = ([Dec], [Stat])\"",
        "fold-alias alias:Block at cons:Prog.Prog/2", "alias2newtype Block Block",
        "newtype2data Block", "ungroup cons:Block.Block/1", "include Stat \"Skip\""},
       {"exclude Nope", "eliminate Stat", "data2newtype Stat", "frobnicate"}},
      {"trans.mf",
       {"introduce \"data Maybe' a = Nothing' | Just' a\"",
        "swap-data unifier(Maybe=Maybe'; Nothing=Nothing', Just=Just') at alias:TransRel/rhs/path:2",
        "insert Just' 2 \"Maybe' a\""},
       {"eliminate Maybe", "delete Just' 7"}},
  };
  std::size_t undos = 0, conflicts = 0;
  for (const auto& p : plans) {
    auto [st, opened] = post("/session", {{"source", readSample(p.sample)}});
    o.check(st == 200, p.sample + ": session not opened");
    if (st != 200) continue;
    std::string id = opened["sessionId"];
    std::string base = "/session/" + id;
    std::vector<std::string> seen{source(id)};
    for (const auto& step : p.steps) {
      // refusals in between must not move the source
      for (const auto& bad : p.refusals) {
        std::string before = source(id);
        auto [rs, rj] = post(base + "/apply", {{"opInvocation", bad}});
        if (rs == 409) {
          ++conflicts;
          o.check(source(id) == before, p.sample + ": 409 for " + bad + " changed the source");
        } else {
          o.check(rs == 400 && source(id) == before, p.sample + ": " + bad + " gave " + std::to_string(rs));
        }
      }
      auto [as, aj] = post(base + "/apply", {{"opInvocation", step}});
      o.check(as == 200, p.sample + ": " + step + " gave " + std::to_string(as) + " " + aj.dump());
      if (as != 200) break;
      seen.push_back(source(id));
      o.check(aj["source"] == seen.back(), p.sample + ": apply response differs from /source");
    }
    // walk the history back, checking every intermediate source
    for (std::size_t i = seen.size() - 1; i > 0; --i) {
      auto [us, uj] = post(base + "/undo", json::object());
      ++undos;
      o.check(us == 200, p.sample + ": undo gave " + std::to_string(us));
      o.check(source(id) == seen[i - 1], p.sample + ": undo " + std::to_string(i) + " not byte-identical");
    }
    std::string start = source(id);
    auto [es, ej] = post(base + "/undo", json::object());
    o.check(es == 409 && source(id) == start, p.sample + ": empty undo");
    ++conflicts;
    o.check(start == seen.front(), p.sample + ": initial source not restored");
  }
  server.stop();
  o.note = std::to_string(undos) + " undos, " + std::to_string(conflicts) + " conflict responses";
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ConsList to SnocList scenario", criterion1},
      {"Block extraction scenario", criterion2},
      {"Maybe to ConsList generalisation", criterion3},
      {"inverse pairs on generated modules", criterion4},
      {"depth-5 structure preservation", criterion5},
      {"refusal soundness and code coverage", criterion6},
      {"to-do markers after include", criterion7},
      {"parse/print round trip", criterion8},
      {"HTTP apply/undo and 409 contract", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.problems.push_back(std::string("uncaught: ") + e.what());
    }
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first;
    if (!o.note.empty()) std::cout << " (" << o.note << ")";
    std::cout << "\n";
    for (const auto& p : o.problems) std::cout << "    " << p << "\n";
    if (!o.pass) ++failed;
  }
  return failed;
}
