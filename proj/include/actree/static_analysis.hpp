#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "actree/model.hpp"
#include "actree/scenario.hpp"

namespace actree {

/// Probability of success together with its complement. The complement is
/// computed on its own path so that it stays accurate when `success` rounds
/// to 1.
struct StaticValue {
  double success = 0.0;
  double failure = 1.0;
};

namespace detail {

/// log(1 - x) given both x and 1 - x, picking the better conditioned form.
inline double log_complement(double x, double one_minus_x) {
  return x < 0.5 ? std::log1p(-x) : std::log(one_minus_x);
}

inline StaticValue evaluate_static(const Act& act, NodeId id) {
  const Node& node = act.node(id);
  if (const auto* leaf = std::get_if<AttackLeaf>(&node.kind)) return {leaf->timing.p, 1.0 - leaf->timing.p};

  if (const auto* g = std::get_if<AndGate>(&node.kind)) {
    StaticValue v{1.0, 0.0};
    double log_success = 0.0;
    for (NodeId c : g->children) {
      StaticValue child;
      if (const auto* cm = std::get_if<CmGate>(&act.node(c).kind)) {
        // Attacker-facing factor: the countermeasure must not succeed.
        const double pd = std::get<DetectLeaf>(act.node(cm->detect).kind).timing.p;
        const double pm = std::get<MitigateLeaf>(act.node(cm->mitigate).kind).timing.p;
        child = {1.0 - pd * pm, pd * pm};
      } else {
        child = evaluate_static(act, c);
      }
      v.success *= child.success;
      log_success += log_complement(child.failure, child.success);
    }
    v.failure = 0.0 - std::expm1(log_success);  // not unary minus: keeps +0 at log 0
    return v;
  }

  if (const auto* g = std::get_if<OrGate>(&node.kind)) {
    StaticValue v{0.0, 1.0};
    double log_failure = 0.0;
    for (NodeId c : g->children) {
      const StaticValue child = evaluate_static(act, c);
      v.failure *= child.failure;
      log_failure += log_complement(child.success, child.failure);
    }
    v.success = 0.0 - std::expm1(log_failure);
    return v;
  }
  throw DomainError("node '" + node.name + "' cannot be evaluated on its own");
}

}  // namespace detail

/// Bottom-up single-parameter analysis of the root under a scenario.
inline StaticValue static_evaluate(const Act& act, Scenario scenario) {
  ensure_valid(act);
  const Act model = apply_scenario(act, scenario);
  return detail::evaluate_static(model, model.root);
}

inline double static_probability(const Act& act, Scenario scenario) {
  return static_evaluate(act, scenario).success;
}

struct SweepResult {
  Scenario scenario;
  std::vector<double> grid;
  std::vector<double> pgoal;
  std::vector<double> pfail;  // 1 - pgoal, accurate near pgoal = 1
};

/// Pleaf sweep: every attack leaf is set to each grid value in turn.
/// Detection and mitigation events keep their modeled probabilities.
inline std::vector<SweepResult> sweep_pleaf(const Act& act, std::span<const double> grid,
                                            std::span<const Scenario> scenarios) {
  ensure_valid(act);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw DomainError("sweep grid values must lie in [0,1]");
    if (i && !(grid[i] > grid[i - 1])) throw DomainError("sweep grid must be strictly increasing");
  }
  std::vector<SweepResult> out;
  for (Scenario s : scenarios) {
    const Act model = apply_scenario(act, s);
    SweepResult r{s, {grid.begin(), grid.end()}, {}, {}};
    for (double x : grid) {
      const Act point = with_attack_probability(model, x);
      const StaticValue v = detail::evaluate_static(point, point.root);
      r.pgoal.push_back(v.success);
      r.pfail.push_back(v.failure);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace actree
