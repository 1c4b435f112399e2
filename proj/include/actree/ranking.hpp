#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "actree/compose.hpp"
#include "actree/scenario.hpp"
#include "actree/transient.hpp"

namespace actree {

/// Effect of one countermeasure on the attack success probability at t*.
struct CmEffect {
  NodeId cm;
  std::string name;
  double pgoal_with = 0.0;
  double pgoal_without = 0.0;
  double delta = 0.0;  // pgoal_without - pgoal_with
};

/// Ranks countermeasures by how much removing each one alone (all others
/// active) raises Pgoal at `t_star`. Sorted by delta descending, then name.
inline std::vector<CmEffect> rank_countermeasures(const Act& act, double t_star, double epsilon,
                                                  const ComposeOptions& options = {}) {
  if (!(t_star > 0.0)) throw DomainError("evaluation time must be positive");
  ensure_valid(act);
  std::vector<CmEffect> out;
  const auto cms = act.nodes_of<CmGate>();
  if (cms.empty()) return out;

  const double with = transient_probability_at(compose(act, Scenario::Full, options), t_star, epsilon);
  for (NodeId cm : cms) {
    const Act reduced = remove_countermeasure(act, cm);
    const double without = transient_probability_at(compose(reduced, Scenario::Full, options), t_star, epsilon);
    out.push_back({cm, act.node(cm).name, with, without, without - with});
  }
  std::sort(out.begin(), out.end(), [](const CmEffect& a, const CmEffect& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.name < b.name;
  });
  return out;
}

}  // namespace actree
