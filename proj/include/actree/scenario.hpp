#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "actree/error.hpp"
#include "actree/model.hpp"

namespace actree {

/// Countermeasure scenarios compared in the analyses.
///   NoCm:       countermeasures removed.
///   DetectOnly: perfect mitigation, a countermeasure completes when detection does.
///   Full:       detection followed by (imperfect) mitigation.
enum class Scenario { NoCm, DetectOnly, Full };

inline constexpr Scenario kAllScenarios[] = {Scenario::NoCm, Scenario::DetectOnly, Scenario::Full};

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::NoCm: return "no-cm";
    case Scenario::DetectOnly: return "detect-only";
    case Scenario::Full: return "full";
  }
  return "?";
}

inline Scenario parse_scenario(std::string_view s) {
  if (s == "no-cm") return Scenario::NoCm;
  if (s == "detect-only") return Scenario::DetectOnly;
  if (s == "full") return Scenario::Full;
  throw DomainError("unknown scenario '" + std::string(s) + "' (expected no-cm, detect-only or full)");
}

namespace detail {

/// Drops the given countermeasure gates together with their detection and
/// mitigation events, then compacts the node table keeping relative order.
inline Act without_countermeasures(const Act& act, const std::vector<NodeId>& doomed) {
  std::vector<bool> drop(act.size(), false);
  for (NodeId cm : doomed) {
    const auto& g = std::get<CmGate>(act.node(cm).kind);
    drop[cm.value] = drop[g.detect.value] = drop[g.mitigate.value] = true;
  }
  std::vector<std::uint32_t> remap(act.size(), 0);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < act.size(); ++i) {
    if (!drop[i]) remap[i] = next++;
  }

  Act out;
  out.title = act.title;
  out.root = NodeId{remap[act.root.value]};
  out.nodes.reserve(next);
  auto rewrite = [&](const std::vector<NodeId>& kids) {
    std::vector<NodeId> r;
    for (NodeId c : kids) {
      if (!drop[c.value]) r.push_back(NodeId{remap[c.value]});
    }
    return r;
  };
  for (std::size_t i = 0; i < act.size(); ++i) {
    if (drop[i]) continue;
    Node n = act.nodes[i];
    if (auto* g = std::get_if<AndGate>(&n.kind)) g->children = rewrite(g->children);
    if (auto* g = std::get_if<OrGate>(&n.kind)) g->children = rewrite(g->children);
    if (auto* g = std::get_if<CmGate>(&n.kind)) *g = CmGate{NodeId{remap[g->detect.value]}, NodeId{remap[g->mitigate.value]}};
    out.nodes.push_back(std::move(n));
  }
  return out;
}

}  // namespace detail

/// Rewrites a valid Act for the requested scenario. The result is valid and
/// keeps every attack leaf and its parameters.
inline Act apply_scenario(const Act& act, Scenario scenario) {
  switch (scenario) {
    case Scenario::Full: return act;
    case Scenario::NoCm: return detail::without_countermeasures(act, act.nodes_of<CmGate>());
    case Scenario::DetectOnly: {
      Act out = act;
      for (NodeId m : out.nodes_of<MitigateLeaf>()) {
        auto& t = std::get<MitigateLeaf>(out.node(m).kind).timing;
        t.p = 1.0;
        t.rate.reset();
        t.horizon = 1.0;
        t.instantaneous = true;
      }
      return out;
    }
  }
  return act;
}

/// The Act with one countermeasure gate (and its events) deleted.
inline Act remove_countermeasure(const Act& act, NodeId cm) {
  if (cm.value >= act.size() || !std::holds_alternative<CmGate>(act.node(cm).kind)) {
    throw DomainError("node is not a countermeasure");
  }
  return detail::without_countermeasures(act, {cm});
}

/// Sets every attack leaf to success probability `p` over its horizon.
/// Leaves specified by an explicit rate fall back to the default one-hour horizon.
inline Act with_attack_probability(const Act& act, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("leaf probability outside [0,1]");
  Act out = act;
  for (NodeId a : out.nodes_of<AttackLeaf>()) {
    auto& t = std::get<AttackLeaf>(out.node(a).kind).timing;
    if (t.rate) t.horizon = 1.0;
    t.p = p;
    t.rate.reset();
  }
  return out;
}

}  // namespace actree
