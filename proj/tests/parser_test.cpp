#include <gtest/gtest.h>

#include <random>

#include "actree/parser.hpp"
#include "actree/serialize.hpp"
#include "oracles.hpp"

using namespace actree;

namespace {

DiagCode first_code(const std::string& text) {
  try {
    parse_act(text);
  } catch (const ValidationError& e) {
    return e.diagnostics().front().code;
  }
  ADD_FAILURE() << "expected a validation error";
  return DiagCode::UndefinedReference;
}

bool has_code(const std::string& text, DiagCode code) {
  try {
    parse_act(text);
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) {
      if (d.code == code) return true;
    }
  }
  return false;
}

}  // namespace

TEST(ParseAct, MinimalModel) {
  const Act act = parse_act(R"(act "T" { root g; g = OR(a); a = ATTACK(p=0.5, t=1.0); })");
  EXPECT_EQ(act.title, "T");
  ASSERT_EQ(act.size(), 2u);
  EXPECT_EQ(act.node(act.root).name, "g");
  const auto& leaf = std::get<AttackLeaf>(act.node(*act.find("a")).kind);
  EXPECT_EQ(leaf.timing.p, 0.5);
  EXPECT_EQ(leaf.timing.horizon, 1.0);
}

TEST(ParseAct, BundledModelStructure) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  EXPECT_EQ(mia.title, "Malicious Insider Attack");
  EXPECT_EQ(mia.nodes_of<CmGate>().size(), 2u);
  EXPECT_EQ(mia.nodes_of<AttackLeaf>().size(), 17u);
  EXPECT_EQ(mia.nodes_of<DetectLeaf>().size(), 2u);
  EXPECT_EQ(mia.nodes_of<MitigateLeaf>().size(), 2u);
  EXPECT_EQ(mia.node(*mia.find("virus_cm")).label, "Virus CM");
  EXPECT_EQ(mia.node(*mia.find("password_cm")).label, "CM to Steal Password");
}

TEST(ParseAct, SelfLoopIsACycle) {
  EXPECT_TRUE(has_code(R"(act "bad" { root g; g = AND(g); })", DiagCode::CycleDetected));
}

TEST(ParseAct, ForwardReferencesAndDefaults) {
  const Act act = parse_act(R"(
    # comment before
    act "fw" {
      root top;            # trailing comment
      top = AND(x, y);
      x = ATTACK(p=0.1);
      y = ATTACK(p=2.5e-1, lambda=0.3);
    })");
  const LeafTiming& x = *act.node(*act.find("x")).timing();
  const LeafTiming& y = *act.node(*act.find("y")).timing();
  EXPECT_EQ(x.horizon, 1.0);
  EXPECT_FALSE(x.rate);
  EXPECT_EQ(y.p, 0.25);
  EXPECT_EQ(*y.rate, 0.3);
  EXPECT_EQ(y.timed_rate().per_hour(), 0.3);
}

TEST(ParseAct, SyntaxErrorsReportPosition) {
  try {
    parse_act("act \"t\" {\n  root g;\n  g = XOR(a);\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 7u);
    EXPECT_EQ(e.expected().size(), 6u);
  }
  try {
    parse_act("act \"t\" { root g; g = OR(a b); a = ATTACK(p=0.1); }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 28u);
    EXPECT_EQ(e.expected(), (std::vector<std::string>{"','", "')'"}));
  }
  EXPECT_THROW(parse_act("act \"t\" { root g; }"), ParseError);
  EXPECT_THROW(parse_act("act \"t { root g; g = ATTACK(p=1); }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(q=1); }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(p=1, s=2); }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(p=1e); }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(p=0.5); } extra"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = CM(a); }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(p=0.5) }"), ParseError);
  EXPECT_THROW(parse_act("act \"t\" { root g; g = ATTACK(p=0.5); @ }"), ParseError);
}

TEST(ParseAct, BindingErrors) {
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a, b); a = ATTACK(p=0.1); })"), DiagCode::UndefinedReference);
  EXPECT_EQ(first_code(R"(act "t" { root h; g = ATTACK(p=0.1); })"), DiagCode::UndefinedReference);
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a); a = ATTACK(p=0.1); a = ATTACK(p=0.2); })"),
            DiagCode::DuplicateDefinition);
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a, c); a = ATTACK(p=0.1); c = CM(d, m);
                              d = DETECT(p=0.5); m = MITIGATE(p=0.5); })"),
            DiagCode::CmPlacement);
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a); a = ATTACK(p=-0.1); })"), DiagCode::ProbabilityRange);
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a); a = ATTACK(p=0.1, lambda=inf); })"),
            DiagCode::InvalidInstantaneous);
  EXPECT_EQ(first_code(R"(act "t" { root g; g = OR(a); a = ATTACK(p=0.1, t=-1); })"), DiagCode::HorizonRange);
}

TEST(ParseAct, ProbabilityOneIsLegalStatically) {
  const Act act = parse_act(R"(act "t" { root a; a = ATTACK(p=1); })");
  EXPECT_THROW(act.node(act.root).timing()->timed_rate(), RateUndefined);
}

TEST(SerializeAct, MinimalRoundTripIsCanonical) {
  const Act act = parse_act(R"(act "T" { root g; g = OR(a); a = ATTACK(p=0.5, t=1.0); })");
  const std::string text = serialize_act(act);
  EXPECT_EQ(text, "act \"T\" {\n  root g;\n  g = OR(a);\n  a = ATTACK(p=0.5, t=1);\n}\n");
  EXPECT_TRUE(structurally_equal(parse_act(text), act));
}

TEST(SerializeAct, BundledModelRoundTrip) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  const std::string text = serialize_act(mia);
  const Act again = parse_act(text);
  EXPECT_TRUE(structurally_equal(again, mia));
  EXPECT_EQ(serialize_act(again), text);
}

TEST(SerializeAct, NamesPreservedByteExact) {
  Act act = parse_act("act \"  spaced \\\"title\\\"\\\\ \" { root g; g \"  Odd   label\t\" = OR(a); a = ATTACK(p=0.5); }");
  EXPECT_EQ(act.title, "  spaced \"title\"\\ ");
  EXPECT_EQ(act.node(act.root).label, "  Odd   label\t");
  const Act again = parse_act(serialize_act(act));
  EXPECT_EQ(again.title, act.title);
  EXPECT_EQ(again.node(again.root).label, act.node(act.root).label);
}

TEST(SerializeAct, ScenarioResultsRoundTrip) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  for (Scenario s : kAllScenarios) {
    const Act out = apply_scenario(mia, s);
    EXPECT_TRUE(structurally_equal(parse_act(serialize_act(out)), out)) << to_string(s);
  }
}

// Round trip over random trees, including awkward doubles.
TEST(SerializeAct, RandomRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    oracle::RandomActBuilder b(rng, i % 3 != 0, i % 2 == 0);
    Act act = b.build(1 + i % 14);
    if (i % 5 == 0) act = apply_scenario(act, Scenario::DetectOnly);
    const std::string text = serialize_act(act);
    const Act again = parse_act(text);
    ASSERT_TRUE(structurally_equal(again, act)) << text;
    ASSERT_EQ(serialize_act(again), text);
  }
}
