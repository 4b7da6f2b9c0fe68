#include <gtest/gtest.h>

#include "dtr/concrete.hpp"
#include "dtr/error.hpp"
#include "dtr/focus.hpp"
#include "test_util.hpp"

using namespace dtr;

namespace {

ErrorCode codeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::BadArguments;
}

const char* kBlock =
    "data Dec = Dec; data Stat = Stat; type Name = String;"
    "type Block = ([Dec], [Stat]);"
    "data Prog = Prog Name [Dec] [Stat];";

// Brute-force enumeration of every (selector, subterm) pair, written
// independently of the library's traversal.
void enumerate(const TypeSel& sel, const TypeExpr& t,
               std::vector<std::pair<TypeSel, TypeExpr>>& out) {
  out.push_back({sel, t});
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    TypeSel c = sel;
    c.path.push_back(i + 1);
    enumerate(c, t.args[i], out);
  }
}

std::vector<std::pair<TypeSel, TypeExpr>> everySubterm(const Module& m) {
  std::vector<std::pair<TypeSel, TypeExpr>> out;
  for (const auto& d : m.decls) {
    if (d.kind == Decl::Kind::Alias) enumerate(TypeSel::aliasRhs(d.name), d.type, out);
    if (d.kind == Decl::Kind::Sig) enumerate(TypeSel::sigType(d.name), d.type, out);
    if (d.kind == Decl::Kind::Newtype)
      enumerate(TypeSel::newtypeRhs(d.name), d.conss[0].components[0], out);
    if (d.kind == Decl::Kind::Data)
      for (const auto& c : d.conss)
        for (std::size_t i = 0; i < c.components.size(); ++i)
          enumerate(TypeSel::consComp(d.name, c.name, i + 1), c.components[i], out);
  }
  return out;
}

TEST(Resolve, Examples) {
  Module b = parseModule(kBlock);
  EXPECT_EQ(printType(resolve(b, TypeSel::aliasRhs("Block"))), "([Dec], [Stat])");
  Module c = test::sample("conslist.mf");
  EXPECT_EQ(printType(resolve(c, TypeSel::consComp("ConsList", "Cons", 2))),
            "ConsList a");
  EXPECT_EQ(codeOf([&] { resolve(c, TypeSel::consComp("ConsList", "Cons", 9)); }),
            ErrorCode::BadIndex);
  EXPECT_EQ(codeOf([&] { resolve(c, TypeSel::aliasRhs("ConsList")); }),
            ErrorCode::KindMismatch);
  EXPECT_EQ(codeOf([&] { resolve(c, TypeSel::aliasRhs("Nope")); }),
            ErrorCode::UnknownName);
  EXPECT_EQ(codeOf([&] { resolve(c, TypeSel::consComp("ConsList", "Cons", 1, {1})); }),
            ErrorCode::BadPath);
  EXPECT_EQ(printType(resolve(c, TypeSel::sigType("firstOr", {2, 1}))), "ConsList a");
}

TEST(Focus, ToSelector) {
  Module b = parseModule(
      "data Dec = Dec; data Stat = Stat; type Block = {! ([Dec], [Stat]) !};");
  EXPECT_EQ(toString(focusToSelector(b)), "alias:Block/rhs");
  Module p = parseModule(
      "data Dec = Dec; data Stat = Stat; data Prog = Prog String {! [Dec] [Stat] !};");
  auto sel = focusToSelector(p);
  EXPECT_EQ(std::get<CompRangeSel>(sel), (CompRangeSel{"Prog", "Prog", 2, 2}));
  EXPECT_EQ(codeOf([&] { focusToSelector(parseModule(kBlock)); }), ErrorCode::NoFocus);
  Module two = parseModuleUnchecked("type A = {! Int !}; type B = {! Int !};");
  EXPECT_EQ(codeOf([&] { focusToSelector(two); }), ErrorCode::MultipleFoci);
  Module n = parseModule("data {!T!} = K;");
  EXPECT_EQ(toString(focusToSelector(n)), "type:T");
}

TEST(Focus, RoundTripEverySelector) {
  for (const char* f : {"conslist.mf", "interp.mf", "trans.mf"}) {
    Module m = test::sample(f);
    auto all = everySubterm(m);
    ASSERT_EQ(allSelectors(m).size(), all.size());
    for (const auto& [sel, sub] : all) {
      EXPECT_EQ(resolve(m, sel), sub);
      Module focused = selectorToFocus(m, sel);
      EXPECT_EQ(countFoci(focused), 1u);
      EXPECT_EQ(std::get<TypeSel>(focusToSelector(focused)), sel);
      EXPECT_TRUE(alphaEq(stripFocus(focused), m));
      // the printed form re-parses to the same focus
      EXPECT_EQ(std::get<TypeSel>(focusToSelector(parseModule(printModule(focused)))),
                sel);
      EXPECT_EQ(codeOf([&] { selectorToFocus(focused, sel); }),
                ErrorCode::AlreadyFocused);
    }
  }
}

TEST(Focus, RangeAndName) {
  Module m = test::sample("interp.mf");
  for (std::size_t s = 1; s <= 3; ++s)
    for (std::size_t n = 1; s + n - 1 <= 3; ++n) {
      CompRangeSel r{"Prog", "Prog", s, n};
      Module f = selectorToFocus(m, r);
      auto back = focusToSelector(parseModule(printModule(f)));
      if (n == 1)
        EXPECT_EQ(std::get<TypeSel>(back), TypeSel::consComp("Prog", "Prog", s));
      else
        EXPECT_EQ(std::get<CompRangeSel>(back), r);
    }
  EXPECT_EQ(codeOf([&] { selectorToFocus(m, CompRangeSel{"Prog", "Prog", 3, 2}); }),
            ErrorCode::BadRange);
  Module t = selectorToFocus(m, TypeNameSel{"Stat"});
  EXPECT_EQ(std::get<TypeNameSel>(focusToSelector(t)).type, "Stat");
}

TEST(Predicates, MatchBruteForce) {
  Module tr = test::sample("trans.mf");
  auto hits = selectorsMatching(tr, TypePredicate::equals(parseTypeFragment("Maybe a")));
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(toString(hits[0]), "alias:TransRel/rhs/path:2");
  EXPECT_TRUE(selectorsMatching(tr, TypePredicate::mentions("Undeclared")).empty());

  for (const char* f : {"conslist.mf", "interp.mf", "trans.mf"}) {
    Module m = test::sample(f);
    auto all = everySubterm(m);
    for (const auto& [sel, sub] : all) {
      std::vector<TypeSel> expected;
      for (const auto& [s2, t2] : all)
        if (t2 == sub) expected.push_back(s2);
      EXPECT_EQ(selectorsMatching(m, TypePredicate::equals(sub)), expected);
    }
    std::vector<TypeSel> apps;
    for (const auto& [s, t] : all)
      if (t.kind == TypeExpr::Kind::App) apps.push_back(s);
    EXPECT_EQ(selectorsMatching(m, parsePredicate("top:App")), apps);
  }
}

TEST(Predicates, Syntax) {
  EXPECT_EQ(toString(parsePredicate("equals:Maybe a")), "equals:Maybe a");
  EXPECT_EQ(toString(parsePredicate("mentions:Prog")), "mentions:Prog");
  EXPECT_EQ(toString(parsePredicate("top:Fun")), "top:Fun");
  EXPECT_EQ(codeOf([] { parsePredicate("top:Blob"); }), ErrorCode::BadArguments);
  EXPECT_EQ(codeOf([] { parsePredicate("equals:a ->"); }), ErrorCode::BadArguments);
}

TEST(Ranges, Occurrences) {
  Module m = parseModule(
      "data D = D; data S = S; data P = P D S | Q Int D S D S;");
  auto occ = rangeOccurrences(m, {parseTypeFragment("D"), parseTypeFragment("S")});
  ASSERT_EQ(occ.size(), 3u);
  EXPECT_EQ(occ[1], (CompRangeSel{"P", "Q", 2, 2}));
  EXPECT_EQ(occ[2], (CompRangeSel{"P", "Q", 4, 2}));
}

TEST(ReplaceAt, KeepsRest) {
  Module m = test::sample("conslist.mf");
  Module r = replaceAt(m, TypeSel::consComp("ConsList", "Cons", 2),
                       [](const TypeExpr&) { return TypeExpr::app("Int"); });
  EXPECT_EQ(printType(resolve(r, TypeSel::consComp("ConsList", "Cons", 2))), "Int");
  EXPECT_EQ(resolve(r, TypeSel::sigType("len")), resolve(m, TypeSel::sigType("len")));
}

}  // namespace
