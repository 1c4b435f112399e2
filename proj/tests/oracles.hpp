#pragma once

// Test-only oracles. Nothing here calls into the analysis code it checks:
// the enumeration and Bernoulli sampling read the raw tree, the closed forms
// are written out by hand.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "actree/model.hpp"
#include "actree/scenario.hpp"

namespace oracle {

using namespace actree;

inline std::string read_model(const std::string& file) {
  std::ifstream in(std::string(ACTREE_MODELS_DIR) + "/" + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Leaf probability as seen by a scenario, without going through apply_scenario.
inline double scenario_leaf_p(const Act& act, NodeId leaf, Scenario s) {
  const Node& n = act.node(leaf);
  if (std::holds_alternative<MitigateLeaf>(n.kind) && s == Scenario::DetectOnly) return 1.0;
  return n.timing()->p;
}

/// Boolean root outcome for one assignment of leaf outcomes.
inline bool attack_succeeds(const Act& act, NodeId id, const std::vector<bool>& outcome, Scenario s) {
  const Node& n = act.node(id);
  if (n.is_leaf()) return outcome[id.value];
  if (const auto* cm = std::get_if<CmGate>(&n.kind)) {
    // "attack succeeds past the countermeasure" = countermeasure did not fully succeed
    if (s == Scenario::NoCm) return true;
    return !(outcome[cm->detect.value] && outcome[cm->mitigate.value]);
  }
  if (const auto* g = std::get_if<AndGate>(&n.kind)) {
    bool all = true;
    for (NodeId c : g->children) all = all && attack_succeeds(act, c, outcome, s);
    return all;
  }
  const auto& g = std::get<OrGate>(n.kind);
  bool any = false;
  for (NodeId c : g.children) any = any || attack_succeeds(act, c, outcome, s);
  return any;
}

/// Exact P(root) by summing over all 2^n leaf outcomes.
inline double enumerate_static(const Act& act, Scenario s) {
  std::vector<NodeId> leaves;
  for (std::uint32_t i = 0; i < act.size(); ++i) {
    if (act.nodes[i].is_leaf()) leaves.push_back(NodeId{i});
  }
  double total = 0.0;
  std::vector<bool> outcome(act.size(), false);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << leaves.size()); ++mask) {
    double w = 1.0;
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      const bool on = (mask >> j) & 1;
      const double p = scenario_leaf_p(act, leaves[j], s);
      outcome[leaves[j].value] = on;
      w *= on ? p : 1.0 - p;
    }
    if (w > 0.0 && attack_succeeds(act, act.root, outcome, s)) total += w;
  }
  return total;
}

struct Estimate {
  double mean;
  double sigma;
};

/// Bernoulli Monte Carlo of the static model.
inline Estimate sample_static(const Act& act, Scenario s, std::uint64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<bool> outcome(act.size(), false);
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    for (std::uint32_t i = 0; i < act.size(); ++i) {
      if (act.nodes[i].is_leaf()) outcome[i] = u(rng) < scenario_leaf_p(act, NodeId{i}, s);
    }
    hits += attack_succeeds(act, act.root, outcome, s);
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// P(T_A < T_D + T_M) for independent exponentials.
inline double race_limit(double attack, double detect, double mitigate) {
  return 1.0 - (detect / (detect + attack)) * (mitigate / (mitigate + attack));
}

/// Random valid trees with exactly `leaves` leaf events (detect/mitigate count as leaves).
class RandomActBuilder {
 public:
  RandomActBuilder(std::mt19937_64& rng, bool with_cm, bool timed_by_rate = false)
      : rng_(rng), with_cm_(with_cm), by_rate_(timed_by_rate) {}

  Act build(int leaves) {
    act_ = Act{};
    act_.title = "random";
    act_.root = subtree(leaves, 0);
    return act_;
  }

 private:
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  LeafTiming timing() {
    LeafTiming t;
    t.p = uniform(0.05, 0.95);
    if (by_rate_) t.rate = uniform(0.2, 3.0);
    else t.horizon = uniform(0.5, 2.0);
    return t;
  }

  NodeId push(NodeKind kind) {
    const NodeId id{static_cast<std::uint32_t>(act_.nodes.size())};
    act_.nodes.push_back(Node{"n" + std::to_string(id.value), "", std::move(kind)});
    return id;
  }

  std::vector<int> split(int total, int parts) {
    std::vector<int> cuts;
    std::vector<int> all;
    for (int i = 1; i < total; ++i) all.push_back(i);
    std::shuffle(all.begin(), all.end(), rng_);
    cuts.assign(all.begin(), all.begin() + (parts - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> sizes;
    int prev = 0;
    for (int c : cuts) {
      sizes.push_back(c - prev);
      prev = c;
    }
    sizes.push_back(total - prev);
    return sizes;
  }

  NodeId subtree(int budget, int depth) {
    if (budget == 1) return push(AttackLeaf{timing()});
    if (with_cm_ && budget >= 3 && pick(0, 2) == 0) {
      const int rest = budget - 2;
      const int k = pick(1, std::min(3, rest));
      std::vector<NodeId> kids;
      for (int part : split(rest, k)) kids.push_back(subtree(part, depth + 1));
      const NodeId d = push(DetectLeaf{timing()});
      const NodeId m = push(MitigateLeaf{timing()});
      const NodeId cm = push(CmGate{d, m});
      kids.insert(kids.begin() + pick(0, static_cast<int>(kids.size())), cm);
      return push(AndGate{kids});
    }
    const int k = depth > 0 && pick(0, 5) == 0 ? 1 : pick(2, std::min(4, budget));
    std::vector<NodeId> kids;
    for (int part : split(budget, k)) kids.push_back(subtree(part, depth + 1));
    if (pick(0, 1)) return push(AndGate{kids});
    return push(OrGate{kids});
  }

  std::mt19937_64& rng_;
  bool with_cm_;
  bool by_rate_;
  Act act_;
};

}  // namespace oracle
