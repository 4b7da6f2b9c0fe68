#include <gtest/gtest.h>

#include "dtr/concrete.hpp"
#include "dtr/datatype_ops.hpp"
#include "dtr/error.hpp"
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

Module mod(const char* text) { return parseModule(text); }

std::string declOf(const Module& m, const std::string& name) {
  const Decl* d = m.findType(name);
  return d ? printDecl(*d) : "<none>";
}

const char* kInterp =
    "type Name = String; data Dec = Dec Name; data Stat = Skip;"
    "data Prog = Prog Name [Dec] [Stat];";

}  // namespace

TEST(Rename, TypeAtDeclarationAndUseSites) {
  Module m = mod("data ConsList a = Nil | Cons a (ConsList a); f :: ConsList Int -> Int; f x = 0;");
  Module r = renameType(m, "ConsList", "SnocList");
  EXPECT_EQ(declOf(r, "SnocList"), "data SnocList a = Nil | Cons a (SnocList a);");
  EXPECT_EQ(printType(r.findSig("f")->type), "SnocList Int -> Int");
  EXPECT_EQ(codeOf([&] { renameType(m, "ConsList", "Int"); }), ErrorCode::NameClash);
  EXPECT_EQ(codeOf([&] { renameType(m, "Nope", "X"); }), ErrorCode::UnknownName);
  EXPECT_TRUE(alphaEq(renameType(r, "SnocList", "ConsList"), m));
}

TEST(Rename, ConstructorDeclaration) {
  Module m = mod("data L a = Nil | Cons a (L a);");
  Module r = renameConsDecl(renameConsDecl(m, "Nil", "Lin"), "Cons", "Snoc");
  EXPECT_EQ(declOf(r, "L"), "data L a = Lin | Snoc a (L a);");
  EXPECT_TRUE(alphaEq(renameConsDecl(m, "Nil", "Nil"), m));
  EXPECT_EQ(codeOf([&] { renameConsDecl(m, "Nope", "X"); }), ErrorCode::UnknownName);
  EXPECT_EQ(codeOf([&] { renameConsDecl(m, "Nil", "Cons"); }), ErrorCode::NameClash);
}

TEST(Permute, TypeParametersReorderUses) {
  Module m = mod("data E a b = L a | R b; type U = E Int String;");
  Module r = permuteTypeParams(m, "E", {2, 1});
  EXPECT_EQ(declOf(r, "E"), "data E b a = L a | R b;");
  EXPECT_EQ(declOf(r, "U"), "type U = E String Int;");
  EXPECT_TRUE(alphaEq(permuteTypeParams(m, "E", {1, 2}), m));
  EXPECT_EQ(codeOf([&] { permuteTypeParams(m, "E", {1, 1}); }), ErrorCode::BadPermutation);
  EXPECT_EQ(codeOf([&] { permuteTypeParams(m, "E", {1}); }), ErrorCode::BadPermutation);
}

TEST(Permute, ConstructorComponents) {
  Module m = mod("data S a = Lin | Snoc a (S a);");
  EXPECT_EQ(declOf(permuteConsDecl(m, "Snoc", {2, 1}), "S"), "data S a = Lin | Snoc (S a) a;");
  EXPECT_TRUE(alphaEq(permuteConsDecl(m, "Snoc", {1, 2}), m));
  EXPECT_EQ(codeOf([&] { permuteConsDecl(m, "Snoc", {1, 2, 3}); }), ErrorCode::BadPermutation);
}

TEST(IntroElim, IntroduceAddsAfterTypes) {
  Module m = mod(kInterp);
  Module r = introduce(m, parseDecls("type Block = ([Dec], [Stat]);"));
  EXPECT_EQ(declOf(r, "Block"), "type Block = ([Dec], [Stat]);");
  EXPECT_TRUE(alphaEq(eliminate(r, {"Block"}), m));
  EXPECT_EQ(codeOf([&] { introduce(m, parseDecls("data Prog = P;")); }), ErrorCode::NameClash);
  EXPECT_EQ(codeOf([&] { introduce(m, parseDecls("data Q = Skip;")); }), ErrorCode::NameClash);
}

TEST(IntroElim, MutuallyRecursiveIntroduction) {
  Module m = mod("data Int2 = I;");
  Module r = introduce(m, parseDecls("data T = T U | E; data U = U T;"));
  EXPECT_NE(r.findType("T"), nullptr);
  EXPECT_NE(r.findType("U"), nullptr);
}

TEST(IntroElim, EliminateRefusesReferencedTypes) {
  Module m = test::sample("trans.mf");
  try {
    eliminate(m, {"Maybe"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StillReferenced);
    auto& l = e.locations();
    EXPECT_NE(std::find(l.begin(), l.end(), "alias:TransRel/rhs"), l.end());
    EXPECT_NE(std::find(l.begin(), l.end(), "sig:next/type"), l.end());
    EXPECT_NE(std::find(l.begin(), l.end(), "loop/1"), l.end());
  }
  EXPECT_EQ(codeOf([&] { eliminate(m, {"Nope"}); }), ErrorCode::UnknownName);
}

TEST(FoldUnfold, BlockComponent) {
  Module m = mod(
      "type Name = String; data Dec = Dec; data Stat = S;"
      "type Block = ([Dec], [Stat]); data Prog = Prog Name ([Dec], [Stat]);");
  TypeSel sel = TypeSel::consComp("Prog", "Prog", 2);
  Module r = foldAlias(m, sel, {"Block", {}});
  EXPECT_EQ(declOf(r, "Prog"), "data Prog = Prog Name Block;");
  EXPECT_TRUE(alphaEq(unfoldAlias(r, sel), m));
}

TEST(FoldUnfold, ParameterisedAlias) {
  Module m = mod("type Pair a = (a, a); data T = T (Int, Int);");
  TypeSel sel = TypeSel::consComp("T", "T", 1);
  Module r = foldAlias(m, sel, {"Pair", {}}, ArgMap{{"a", {1}}});
  EXPECT_EQ(declOf(r, "T"), "data T = T (Pair Int);");
  EXPECT_EQ(declOf(foldAlias(m, sel, {"Pair", {}}), "T"), "data T = T (Pair Int);");
  EXPECT_EQ(declOf(unfoldAlias(r, sel), "T"), "data T = T (Int, Int);");
  EXPECT_EQ(codeOf([&] { foldAlias(m, sel, {"Pair", {}}, ArgMap{{"a", {3}}}); }),
            ErrorCode::BadArgMap);
  EXPECT_EQ(codeOf([&] { foldAlias(m, sel, {"Pair", {"x", "y"}}); }), ErrorCode::BadArgMap);
}

TEST(FoldUnfold, Refusals) {
  Module m = mod("type B = ([Int], [String]); data P = P ([String], [Int]) B; data Q = Q;");
  TypeSel c1 = TypeSel::consComp("P", "P", 1);
  EXPECT_EQ(codeOf([&] { foldAlias(m, c1, {"B", {}}); }), ErrorCode::RhsMismatch);
  EXPECT_EQ(codeOf([&] { foldAlias(m, c1, {"Q", {}}); }), ErrorCode::NotAnAlias);
  EXPECT_EQ(codeOf([&] { foldAlias(m, TypeSel::aliasRhs("B"), {"B", {}}); }),
            ErrorCode::RhsMismatch);
  EXPECT_EQ(codeOf([&] { unfoldAlias(m, c1); }), ErrorCode::NotAliasApplication);
  Module r = unfoldAlias(m, TypeSel::consComp("P", "P", 2));
  EXPECT_EQ(declOf(r, "P"), "data P = P ([String], [Int]) ([Int], [String]);");
}

TEST(GroupUngroup, ProgComponents) {
  Module m = mod(kInterp);
  Module g = groupComponents(m, {"Prog", "Prog", 2, 2});
  EXPECT_EQ(declOf(g, "Prog"), "data Prog = Prog Name ([Dec], [Stat]);");
  EXPECT_TRUE(alphaEq(ungroupComponent(g, "Prog", "Prog", 2), m));
  EXPECT_EQ(codeOf([&] { groupComponents(m, {"Prog", "Prog", 2, 1}); }), ErrorCode::BadRange);
  EXPECT_EQ(codeOf([&] { groupComponents(m, {"Prog", "Prog", 3, 2}); }), ErrorCode::BadRange);
  EXPECT_EQ(codeOf([&] { ungroupComponent(m, "Prog", "Prog", 1); }), ErrorCode::NotATuple);
}

TEST(WrapUnwrap, AliasNewtypeData) {
  Module m = mod("data Dec = D; data Stat = S; type Block = ([Dec], [Stat]);");
  Module n = alias2newtype(m, "Block", "Block");
  EXPECT_EQ(declOf(n, "Block"), "newtype Block = Block ([Dec], [Stat]);");
  EXPECT_TRUE(alphaEq(newtype2alias(n, "Block"), m));
  Module d = newtype2data(n, "Block");
  EXPECT_EQ(declOf(d, "Block"), "data Block = Block ([Dec], [Stat]);");
  EXPECT_TRUE(alphaEq(data2newtype(d, "Block"), n));

  EXPECT_EQ(codeOf([&] { alias2newtype(m, "Dec", "K"); }), ErrorCode::NotAnAlias);
  EXPECT_EQ(codeOf([&] { alias2newtype(m, "Block", "S"); }), ErrorCode::NameClash);
  EXPECT_EQ(codeOf([&] { newtype2alias(m, "Dec"); }), ErrorCode::NotANewtype);
  EXPECT_EQ(codeOf([&] { newtype2data(m, "Dec"); }), ErrorCode::NotANewtype);
  Module two = mod("data T = A Int | B;");
  EXPECT_EQ(codeOf([&] { data2newtype(two, "T"); }), ErrorCode::NotConvertibleToNewtype);
}

TEST(WrapUnwrap, NewtypeToAliasKeepsParameters) {
  Module m = mod("data Store = St; newtype State = State Store; newtype W a = W [a];");
  EXPECT_EQ(declOf(newtype2alias(m, "State"), "State"), "type State = Store;");
  EXPECT_EQ(declOf(newtype2alias(m, "W"), "W"), "type W a = [a];");
}

TEST(Swap, Aliases) {
  Module m = mod("type A = Int -> Int; type B = Int -> Int; type C = Int; f :: A -> Int; f x = 0;");
  TypeSel sel = TypeSel::sigType("f", {1});
  Module r = swapAlias(m, "A", "B", sel);
  EXPECT_EQ(printType(r.findSig("f")->type), "B -> Int");
  EXPECT_TRUE(alphaEq(swapAlias(r, "B", "A", sel), m));
  EXPECT_EQ(codeOf([&] { swapAlias(m, "A", "C", sel); }), ErrorCode::NotEquivalent);
  EXPECT_EQ(codeOf([&] { swapAlias(m, "A", "B", TypeSel::sigType("f", {2})); }),
            ErrorCode::NotAnApplicationOfOld);
}

TEST(Swap, DataWithUnifier) {
  Module m = test::sample("trans.mf");
  m = introduce(m, parseDecls("data Maybe' a = Nothing' | Just' a;"));
  DataUnifier u{"Maybe", "Maybe'", {{"Nothing", "Nothing'"}, {"Just", "Just'"}}};
  TypeSel sel = TypeSel::aliasRhs("TransRel", {2});
  Module r = swapData(m, {u}, sel);
  EXPECT_EQ(declOf(r, "TransRel"), "type TransRel a = a -> Maybe' a;");
  EXPECT_TRUE(alphaEq(swapData(r, {u.inverse()}, sel), m));

  DataUnifier bad{"Maybe", "Maybe'", {{"Nothing", "Just'"}, {"Just", "Nothing'"}}};
  EXPECT_EQ(codeOf([&] { swapData(m, {bad}, sel); }), ErrorCode::UnifierInvalid);
  DataUnifier partial{"Maybe", "Maybe'", {{"Nothing", "Nothing'"}}};
  EXPECT_EQ(codeOf([&] { swapData(m, {partial}, sel); }), ErrorCode::UnifierInvalid);
  EXPECT_EQ(codeOf([&] { swapData(m, {u}, TypeSel::aliasRhs("TransRel", {1})); }),
            ErrorCode::NotAnApplicationOfOld);
}

TEST(Swap, MutuallyRecursiveUnifiers) {
  Module m = mod(
      "data T = T U | E; data U = U T;"
      "data T2 = T2 U2 | E2; data U2 = U2 T2; data H = H T;");
  DataUnifier t{"T", "T2", {{"T", "T2"}, {"E", "E2"}}};
  DataUnifier u{"U", "U2", {{"U", "U2"}}};
  EXPECT_NO_THROW(validateUnifiers(m, {t, u}));
  EXPECT_EQ(codeOf([&] { validateUnifiers(m, {t}); }), ErrorCode::UnifierInvalid);
  Module r = swapData(m, {t, u}, TypeSel::consComp("H", "H", 1));
  EXPECT_EQ(declOf(r, "H"), "data H = H T2;");
}

TEST(IncludeExclude, Constructors) {
  Module m = mod("data Block = B; data Stat = Assign Int | Print Int; newtype N = N Int;");
  Module r = includeCons(m, "Stat", parseConsDecl("SBlock Block"));
  EXPECT_EQ(declOf(r, "Stat"), "data Stat = Assign Int | Print Int | SBlock Block;");
  EXPECT_EQ(declOf(includeCons(m, "Stat", parseConsDecl("Skip"), 1), "Stat"),
            "data Stat = Skip | Assign Int | Print Int;");
  EXPECT_TRUE(alphaEq(excludeCons(r, "Stat", "SBlock"), m));
  EXPECT_EQ(codeOf([&] { includeCons(m, "N", parseConsDecl("K")); }), ErrorCode::NotAData);
  EXPECT_EQ(codeOf([&] { includeCons(m, "Stat", parseConsDecl("Print")); }), ErrorCode::NameClash);
  EXPECT_EQ(codeOf([&] { includeCons(m, "Stat", parseConsDecl("K a")); }),
            ErrorCode::UnboundTypeVar);
  EXPECT_EQ(codeOf([&] { includeCons(m, "Stat", parseConsDecl("K"), 5); }), ErrorCode::BadIndex);
  EXPECT_EQ(codeOf([&] { excludeCons(m, "Block", "B"); }), ErrorCode::LastConstructor);
  EXPECT_EQ(codeOf([&] { excludeCons(m, "Stat", "B"); }), ErrorCode::UnknownName);
  EXPECT_EQ(codeOf([&] { excludeCons(m, "N", "N"); }), ErrorCode::NotAData);
}

TEST(InsertDelete, Components) {
  Module m = mod("data Maybe' a = Nothing' | Just' a; newtype N = N Int;");
  Module r = insertComponent(m, "Just'", 2, parseTypeFragment("Maybe' a"));
  EXPECT_EQ(declOf(r, "Maybe'"), "data Maybe' a = Nothing' | Just' a (Maybe' a);");
  EXPECT_TRUE(alphaEq(deleteComponent(r, "Just'", 2), m));
  EXPECT_EQ(codeOf([&] { insertComponent(m, "Just'", 3, parseTypeFragment("Int")); }),
            ErrorCode::BadIndex);
  EXPECT_EQ(codeOf([&] { insertComponent(m, "Just'", 1, parseTypeFragment("b")); }),
            ErrorCode::UnboundTypeVar);
  EXPECT_EQ(codeOf([&] { insertComponent(m, "Nope", 1, parseTypeFragment("Int")); }),
            ErrorCode::NotADataOrNewtypeCons);
  EXPECT_EQ(codeOf([&] { insertComponent(m, "N", 1, parseTypeFragment("Int")); }),
            ErrorCode::NotANewtypeTarget);
  EXPECT_EQ(codeOf([&] { deleteComponent(m, "Just'", 0); }), ErrorCode::BadIndex);
  EXPECT_EQ(codeOf([&] { deleteComponent(m, "N", 1); }), ErrorCode::NotANewtypeTarget);

  Module l = mod("data L a = Nil | Cons a (L a);");
  EXPECT_EQ(declOf(deleteComponent(l, "Cons", 2), "L"), "data L a = Nil | Cons a;");
}

TEST(Expansion, AliasesExpandFullyAndAtTheHead) {
  Module m = mod("type P a = (a, a); type Q = P Int; type R = [Q];");
  EXPECT_EQ(printType(expandFull(m, parseTypeFragment("R"))), "[(Int, Int)]");
  EXPECT_EQ(printType(expandHead(m, parseTypeFragment("R"))), "[Q]");
  EXPECT_EQ(printType(expandHead(m, parseTypeFragment("Q"))), "(Int, Int)");
}
