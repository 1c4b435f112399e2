#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "actree/parser.hpp"
#include "actree/scenario.hpp"
#include "oracles.hpp"

using namespace actree;

namespace {

std::vector<DiagCode> codes(const Act& act) {
  std::vector<DiagCode> out;
  for (const auto& d : validate_act(act)) out.push_back(d.code);
  std::sort(out.begin(), out.end());
  return out;
}

Node leaf(std::string name, double p = 0.5) { return Node{std::move(name), "", AttackLeaf{{p}}}; }

// g = AND(a, cm); cm = CM(d, m)
Act guarded() {
  Act act;
  act.title = "guarded";
  act.nodes = {Node{"g", "", AndGate{{NodeId{1}, NodeId{2}}}}, leaf("a"), Node{"cm", "", CmGate{NodeId{3}, NodeId{4}}},
               Node{"d", "", DetectLeaf{{0.6}}}, Node{"m", "", MitigateLeaf{{0.5}}}};
  act.root = NodeId{0};
  return act;
}

}  // namespace

TEST(ValidateAct, BundledModelIsValid) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  EXPECT_TRUE(validate_act(mia).empty());
  EXPECT_TRUE(validate_act(guarded()).empty());
}

TEST(ValidateAct, SharedSubtree) {
  Act act;
  act.title = "shared";
  act.nodes = {Node{"r", "", OrGate{{NodeId{1}, NodeId{2}}}}, Node{"x", "", AndGate{{NodeId{3}}}},
               Node{"y", "", OrGate{{NodeId{3}}}}, leaf("s")};
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::SharedSubtree});
}

TEST(ValidateAct, CountermeasureUnderOr) {
  Act act = guarded();
  act.nodes[0].kind = OrGate{{NodeId{1}, NodeId{2}}};
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::CmPlacement});
}

TEST(ValidateAct, CountermeasureStructure) {
  Act act = guarded();
  std::get<AndGate>(act.nodes[0].kind).children = {NodeId{2}};
  EXPECT_EQ(codes(act), (std::vector<DiagCode>{DiagCode::OrphanNode, DiagCode::CmWithoutAttack}));

  act = guarded();
  std::swap(std::get<CmGate>(act.nodes[2].kind).detect, std::get<CmGate>(act.nodes[2].kind).mitigate);
  EXPECT_EQ(codes(act), (std::vector<DiagCode>{DiagCode::CmChildKind, DiagCode::CmChildKind}));

  act = guarded();
  act.nodes.push_back(Node{"cm2", "", CmGate{NodeId{6}, NodeId{7}}});
  act.nodes.push_back(Node{"d2", "", DetectLeaf{{0.5}}});
  act.nodes.push_back(Node{"m2", "", MitigateLeaf{{0.5}}});
  std::get<AndGate>(act.nodes[0].kind).children.push_back(NodeId{5});
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::MultipleCm});
}

TEST(ValidateAct, DefenseEventsOnlyUnderCountermeasures) {
  Act act;
  act.title = "t";
  act.nodes = {Node{"r", "", OrGate{{NodeId{1}, NodeId{2}}}}, leaf("a"), Node{"d", "", DetectLeaf{{0.5}}}};
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::DefenseLeafPlacement});
}

TEST(ValidateAct, ParameterRanges) {
  Act act = guarded();
  std::get<AttackLeaf>(act.nodes[1].kind).timing.p = 1.5;
  std::get<DetectLeaf>(act.nodes[3].kind).timing.horizon = 0.0;
  std::get<MitigateLeaf>(act.nodes[4].kind).timing.rate = -2.0;
  EXPECT_EQ(codes(act), (std::vector<DiagCode>{DiagCode::ProbabilityRange, DiagCode::HorizonRange, DiagCode::RateRange}));

  act = guarded();
  std::get<AttackLeaf>(act.nodes[1].kind).timing.instantaneous = true;
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::InvalidInstantaneous});

  act = guarded();
  std::get<AttackLeaf>(act.nodes[1].kind).timing.p = 1.0;  // legal statically
  EXPECT_TRUE(codes(act).empty());
}

TEST(ValidateAct, StructuralErrors) {
  Act act;
  act.title = "t";
  act.nodes = {Node{"r", "", OrGate{}}};
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::EmptyGate});

  act.nodes = {Node{"r", "", OrGate{{NodeId{1}}}}, Node{"x", "", AndGate{{NodeId{2}}}}, Node{"y", "", OrGate{{NodeId{1}}}}};
  const auto c = codes(act);
  EXPECT_NE(std::find(c.begin(), c.end(), DiagCode::CycleDetected), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), DiagCode::SharedSubtree), c.end());

  act.nodes = {Node{"r", "", OrGate{{NodeId{7}}}}};
  EXPECT_EQ(codes(act), std::vector<DiagCode>{DiagCode::UndefinedReference});

  act.nodes = {Node{"r", "", OrGate{{NodeId{1}}}}, leaf("bad name"), leaf("r")};
  act.nodes.push_back(leaf("orphan"));
  const auto c2 = codes(act);
  EXPECT_NE(std::find(c2.begin(), c2.end(), DiagCode::InvalidName), c2.end());
  EXPECT_NE(std::find(c2.begin(), c2.end(), DiagCode::DuplicateDefinition), c2.end());
  EXPECT_NE(std::find(c2.begin(), c2.end(), DiagCode::OrphanNode), c2.end());
}

TEST(ValidateAct, RandomTreesAreValid) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    oracle::RandomActBuilder b(rng, i % 2 == 0);
    const Act act = b.build(1 + i % 12);
    EXPECT_TRUE(validate_act(act).empty()) << validate_act(act).front().str();
  }
}

TEST(ApplyScenario, FullIsIdentity) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  EXPECT_TRUE(structurally_equal(apply_scenario(mia, Scenario::Full), mia));
}

TEST(ApplyScenario, NoCmRemovesCountermeasures) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  const Act bare = apply_scenario(mia, Scenario::NoCm);
  EXPECT_TRUE(validate_act(bare).empty());
  EXPECT_EQ(bare.nodes_of<CmGate>().size(), 0u);
  EXPECT_EQ(bare.nodes_of<DetectLeaf>().size(), 0u);
  EXPECT_EQ(bare.nodes_of<MitigateLeaf>().size(), 0u);
  EXPECT_EQ(bare.size(), mia.size() - 6);
  // Guarded AND gates keep their attack children and become pass-through.
  const auto& manip = std::get<AndGate>(bare.node(*bare.find("virus_manipulation")).kind);
  ASSERT_EQ(manip.children.size(), 1u);
  EXPECT_EQ(bare.node(manip.children[0]).name, "launch_virus");
}

TEST(ApplyScenario, DetectOnlyMakesMitigationInstantaneous) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  const Act detect = apply_scenario(mia, Scenario::DetectOnly);
  EXPECT_TRUE(validate_act(detect).empty());
  const auto mitigations = detect.nodes_of<MitigateLeaf>();
  ASSERT_EQ(mitigations.size(), 2u);
  for (NodeId m : mitigations) {
    const LeafTiming& t = *detect.node(m).timing();
    EXPECT_TRUE(t.instantaneous);
    EXPECT_EQ(t.p, 1.0);
  }
  EXPECT_EQ(detect.nodes_of<CmGate>().size(), 2u);
}

TEST(ApplyScenario, PreservesValidityAndAttackLeaves) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    oracle::RandomActBuilder b(rng, true);
    const Act act = b.build(1 + i % 12);
    for (Scenario s : kAllScenarios) {
      const Act out = apply_scenario(act, s);
      ASSERT_TRUE(validate_act(out).empty());
      const auto before = act.nodes_of<AttackLeaf>();
      const auto after = out.nodes_of<AttackLeaf>();
      ASSERT_EQ(before.size(), after.size());
      for (std::size_t k = 0; k < before.size(); ++k) {
        EXPECT_EQ(act.node(before[k]).name, out.node(after[k]).name);
        EXPECT_EQ(*act.node(before[k]).timing(), *out.node(after[k]).timing());
      }
    }
  }
}

TEST(RemoveCountermeasure, DropsOnlyThatGate) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  const Act out = remove_countermeasure(mia, *mia.find("virus_cm"));
  EXPECT_TRUE(validate_act(out).empty());
  EXPECT_FALSE(out.find("virus_cm"));
  EXPECT_FALSE(out.find("detect_virus"));
  EXPECT_TRUE(out.find("password_cm"));
  EXPECT_THROW(remove_countermeasure(mia, *mia.find("launch_virus")), DomainError);
}

TEST(WithAttackProbability, OverridesAttackLeavesOnly) {
  const Act mia = parse_act(oracle::read_model("mia.act"));
  const Act out = with_attack_probability(mia, 0.25);
  for (NodeId a : out.nodes_of<AttackLeaf>()) EXPECT_EQ(out.node(a).timing()->p, 0.25);
  for (NodeId d : out.nodes_of<DetectLeaf>()) EXPECT_EQ(out.node(d).timing()->p, 0.5);
  EXPECT_THROW(with_attack_probability(mia, 1.2), DomainError);
}
