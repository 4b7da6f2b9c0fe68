#include <gtest/gtest.h>

#include "dtr/concrete.hpp"
#include "dtr/engine.hpp"
#include "dtr/evaluator.hpp"
#include "dtr/focus.hpp"
#include "test_util.hpp"

using namespace dtr;

namespace {

std::string val(const Module& m, const std::string& e) { return printValue(eval(m, e)); }

bool shows(const Module& m, const std::string& text) {
  return printModule(m).find(text) != std::string::npos;
}

}  // namespace

TEST(Script, ParseAndPrint) {
  Script s = parseScript(test::readSample("maybe2list.trafo"));
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].op, "introduce");
  EXPECT_EQ(s[0].args, std::vector<std::string>{"data Maybe' a = Nothing' | Just' a"});
  EXPECT_EQ(s[1].args.front(), "unifier(Maybe=Maybe'; Nothing=Nothing', Just=Just')");
  EXPECT_EQ(parseScript(printScript(s)), s);
}

TEST(Script, ErrorsCarryLineNumbers) {
  try {
    parseScript("rename-type A B\n\nfrobnicate X\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadArguments);
    EXPECT_NE(e.detail().find("3"), std::string::npos) << e.detail();
  }
  EXPECT_THROW(parseInvocation("introduce \"unterminated"), Error);
}

TEST(Apply, ArityOfArgumentsIsChecked) {
  Module m = test::sample("conslist.mf");
  TrafoResult r = applyOp(m, parseInvocation("rename-type ConsList"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.code, ErrorCode::BadArguments);
  EXPECT_EQ(printModule(r.module), printModule(m));
}

TEST(Apply, ChangedLocations) {
  Module m = test::sample("conslist.mf");
  TrafoResult r = applyOp(m, parseInvocation("rename-cons Nil Empty"));
  ASSERT_TRUE(r.ok);
  auto has = [&](const std::string& s) {
    return std::find(r.changed.begin(), r.changed.end(), s) != r.changed.end();
  };
  EXPECT_TRUE(has("type:ConsList"));
  EXPECT_TRUE(has("len/1"));
  EXPECT_FALSE(has("len/2"));
  EXPECT_FALSE(has("sig:len/type"));
}

TEST(Sequence, RefusalReportsStepAndKeepsInput) {
  Module m = test::sample("conslist.mf");
  Trafo t = seqTrafo(opTrafo(parseInvocation("rename-type ConsList L")),
                     opTrafo(parseInvocation("rename-cons Nope X")));
  TrafoResult r = t(m);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.failedStep, 2u);
  EXPECT_EQ(r.code, ErrorCode::UnknownName);
  EXPECT_EQ(printModule(r.module), printModule(m));
  EXPECT_FALSE(r.asOptional());

  TrafoResult id = seqTrafo(identityTrafo(), identityTrafo())(m);
  ASSERT_TRUE(id.ok);
  EXPECT_TRUE(alphaEq(*id.asOptional(), m));
}

TEST(Scenario, SnocList) {
  Module m = test::sample("conslist.mf");
  TrafoResult r = runScript(m, parseScript(test::readSample("snoclist.trafo")));
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_TRUE(alphaEq(parseModule(printDecl(*r.module.findType("SnocList"))),
                      parseModule("data SnocList a = Lin | Snoc (SnocList a) a;")));
  for (const char* p : {"len sample", "sum sample", "sum (fromList [7, 8])", "firstOr 0 sample"})
    EXPECT_EQ(val(m, p), val(r.module, p)) << p;
  EXPECT_EQ(r.steps.size(), 4u);
}

TEST(Scenario, ExtractBlock) {
  Module m = test::sample("interp.mf");
  TrafoResult r = runScript(m, parseScript(test::readSample("extract_block.trafo")));
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(printDecl(*r.module.findType("Prog")), "data Prog = Prog Name Block;");
  EXPECT_EQ(printDecl(*r.module.findType("Block")), "data Block = Block [Dec] [Stat];");
  EXPECT_EQ(val(m, "run sample s0 \"y\""), val(r.module, "run sample s0 \"y\""));
}

TEST(Scenario, MaybeToConsList) {
  Module m = test::sample("trans.mf");
  TrafoResult r = runScript(m, parseScript(test::readSample("maybe2list.trafo")));
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(printDecl(*r.module.findType("TransRel")), "type TransRel a = a -> ConsList a;");
  for (const char* f : {"toMaybe", "fromMaybe", "toMaybe'", "fromMaybe'"})
    EXPECT_NE(r.module.findFun(f), nullptr) << f;
  for (int s = 0; s < 3; ++s) {
    std::string p = "deadEnd loop " + std::to_string(s);
    EXPECT_EQ(val(m, p), val(r.module, p));
  }
}

TEST(CompoundFold, FoldsRangeIntoNewData) {
  Module m = test::sample("interp.mf");
  FoldRequest req{parseCompRangeSel("cons:Prog.Prog/2..3"), "Block", FoldKind::Data, "", {}};
  Script steps = expandCompoundFold(m, req);
  ASSERT_FALSE(steps.empty());
  EXPECT_EQ(steps.front().op, "group");
  TrafoResult r = compoundFold(m, req);
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(printDecl(*r.module.findType("Block")), "data Block = Block [Dec] [Stat];");
  EXPECT_EQ(printDecl(*r.module.findType("Prog")), "data Prog = Prog Name Block;");
  EXPECT_EQ(val(m, "run sample s0 \"x\""), val(r.module, "run sample s0 \"x\""));
}

TEST(CompoundFold, AliasAndNewtypeKinds) {
  Module m = test::sample("interp.mf");
  FoldRequest a{parseCompRangeSel("cons:Prog.Prog/2..3"), "Block", FoldKind::Alias, "", {}};
  TrafoResult ra = compoundFold(m, a);
  ASSERT_TRUE(ra.ok);
  EXPECT_EQ(printDecl(*ra.module.findType("Block")), "type Block = ([Dec], [Stat]);");
  FoldRequest n{parseCompRangeSel("cons:Prog.Prog/2..3"), "Block", FoldKind::Newtype, "MkBlock", {}};
  TrafoResult rn = compoundFold(m, n);
  ASSERT_TRUE(rn.ok);
  EXPECT_EQ(printDecl(*rn.module.findType("Block")), "newtype Block = MkBlock ([Dec], [Stat]);");
}

TEST(CompoundFold, ExistingAliasIsReused) {
  Module m = parseModule(printModule(test::sample("interp.mf")) + "type Body = ([Dec], [Stat]);");
  FoldRequest req{parseCompRangeSel("cons:Prog.Prog/2..3"), "Body", FoldKind::Alias, "", {}};
  Script steps = expandCompoundFold(m, req);
  for (const auto& s : steps) EXPECT_NE(s.op, "introduce");
  TrafoResult r = compoundFold(m, req);
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(printDecl(*r.module.findType("Prog")), "data Prog = Prog Name Body;");

  FoldRequest clash = req;
  clash.introduce = true;
  TrafoResult c = compoundFold(m, clash);
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.code, ErrorCode::NameClash);
}

TEST(Session, ApplyUndoReplay) {
  Module m = test::sample("conslist.mf");
  Session s(m);
  EXPECT_THROW(s.undo(), Error);
  ASSERT_TRUE(s.apply(parseInvocation("rename-type ConsList SnocList")).ok);
  std::string afterOne = printModule(s.current());
  TrafoResult bad = s.apply(parseInvocation("rename-cons Nope X"));
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(printModule(s.current()), afterOne);
  EXPECT_EQ(s.history().size(), 1u);
  ASSERT_TRUE(s.applyScript(parseScript("rename-cons Nil Lin\nrename-cons Cons Snoc\n")).ok);
  EXPECT_EQ(s.history().size(), 3u);
  EXPECT_EQ(printModule(s.replay()), printModule(s.current()));
  s.undo();
  s.undo();
  EXPECT_EQ(printModule(s.current()), afterOne);
  s.undo();
  EXPECT_EQ(printModule(s.current()), printModule(m));
}

TEST(Session, ScriptIsAtomic) {
  Session s(test::sample("conslist.mf"));
  std::string before = printModule(s.current());
  TrafoResult r = s.applyScript(parseScript("rename-cons Nil Lin\nrename-cons Nope X\n"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.failedStep, 2u);
  EXPECT_EQ(printModule(s.current()), before);
  EXPECT_TRUE(s.history().empty());
}

TEST(Session, ExtractRecordsConstituentSteps) {
  Session s(test::sample("interp.mf"));
  TrafoResult r = s.apply(parseInvocation("extract cons:Prog.Prog/2..3 Block data"));
  ASSERT_TRUE(r.ok) << r.detail;
  EXPECT_GT(s.history().size(), 1u);
  EXPECT_EQ(s.history().front().inv.op, "group");
}

TEST(Session, FocusMustResolve) {
  Session s(test::sample("interp.mf"));
  EXPECT_NO_THROW(s.setFocus(parseFocusTarget("cons:Prog.Prog/2")));
  EXPECT_THROW(s.setFocus(parseFocusTarget("cons:Prog.Prog/9")), Error);
  ASSERT_TRUE(s.focus());
  EXPECT_EQ(toString(*s.focus()), "cons:Prog.Prog/2");
}

TEST(Catalogue, OffersOnlyApplicableOperators) {
  Module m = test::sample("interp.mf");
  auto none = applicableOps(m, std::nullopt);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0].op, "introduce");

  for (const char* sel : {"type:Prog", "type:Stat", "alias:State/rhs", "cons:Prog.Prog/2..3",
                          "cons:Prog.Prog/2", "sig:run/type/path:2.1"}) {
    auto ops = applicableOps(m, parseFocusTarget(sel));
    EXPECT_FALSE(ops.empty()) << sel;
    for (const auto& inv : ops) {
      if (inv.op == "introduce") continue;
      EXPECT_TRUE(applyOp(m, inv).ok) << sel << ": " << inv.toString();
    }
  }
  auto range = applicableOps(m, parseFocusTarget("cons:Prog.Prog/2..3"));
  EXPECT_TRUE(std::any_of(range.begin(), range.end(), [](auto& i) { return i.op == "group"; }));
  auto alias = applicableOps(m, parseFocusTarget("alias:State/rhs"));
  EXPECT_TRUE(std::none_of(alias.begin(), alias.end(), [](auto& i) { return i.op == "group"; }));
}

TEST(Catalogue, UsageForEveryVerb) {
  for (const auto& op : opNames()) EXPECT_FALSE(opUsage(op).empty()) << op;
  EXPECT_THROW(opUsage("frobnicate"), Error);
}

TEST(Scenario, ProbesAgreeAfterEachStep) {
  Module m = test::sample("interp.mf");
  Script s = parseScript(test::readSample("extract_block.trafo"));
  Module cur = m;
  for (const auto& inv : s) {
    TrafoResult r = applyOp(cur, inv);
    ASSERT_TRUE(r.ok) << inv.toString() << ": " << r.detail;
    cur = r.module;
    EXPECT_TRUE(shows(cur, "run ("));
  }
}
