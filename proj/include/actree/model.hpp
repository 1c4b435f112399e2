#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "actree/error.hpp"
#include "actree/timing.hpp"

namespace actree {

/// Dense index of a node inside one Act.
struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Annotation of a basic event.
///
/// `p` is the single-parameter success probability used by the static
/// analysis. The timed behaviour is either derived from `p` at `horizon`
/// hours, or given directly by `rate`. An instantaneous leaf completes the
/// moment it is activated; only mitigation leaves may be instantaneous
/// (perfect mitigation).
struct LeafTiming {
  double p = 0.0;
  double horizon = 1.0;
  std::optional<double> rate;
  bool instantaneous = false;

  /// Exponential rate of the leaf's delay. Not meaningful for instantaneous leaves.
  Rate timed_rate() const {
    if (instantaneous) throw DomainError("instantaneous leaf has no finite rate");
    if (rate) return Rate(*rate);
    return rate_from_probability(p, horizon);
  }

  friend bool operator==(const LeafTiming&, const LeafTiming&) = default;
};

struct AttackLeaf {
  LeafTiming timing;
  friend bool operator==(const AttackLeaf&, const AttackLeaf&) = default;
};
struct DetectLeaf {
  LeafTiming timing;
  friend bool operator==(const DetectLeaf&, const DetectLeaf&) = default;
};
struct MitigateLeaf {
  LeafTiming timing;
  friend bool operator==(const MitigateLeaf&, const MitigateLeaf&) = default;
};
struct AndGate {
  std::vector<NodeId> children;
  friend bool operator==(const AndGate&, const AndGate&) = default;
};
struct OrGate {
  std::vector<NodeId> children;
  friend bool operator==(const OrGate&, const OrGate&) = default;
};
/// Countermeasure: a detection event followed by a mitigation event.
struct CmGate {
  NodeId detect;
  NodeId mitigate;
  friend bool operator==(const CmGate&, const CmGate&) = default;
};

using NodeKind = std::variant<AttackLeaf, DetectLeaf, MitigateLeaf, AndGate, OrGate, CmGate>;

struct Node {
  std::string name;   // identifier used in the DSL
  std::string label;  // optional display name; empty when absent
  NodeKind kind;

  const std::string& display_name() const { return label.empty() ? name : label; }

  bool is_leaf() const {
    return std::holds_alternative<AttackLeaf>(kind) || std::holds_alternative<DetectLeaf>(kind) ||
           std::holds_alternative<MitigateLeaf>(kind);
  }

  const LeafTiming* timing() const {
    return std::visit(
        [](const auto& k) -> const LeafTiming* {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, AttackLeaf> || std::is_same_v<K, DetectLeaf> ||
                        std::is_same_v<K, MitigateLeaf>) {
            return &k.timing;
          } else {
            return nullptr;
          }
        },
        kind);
  }
  LeafTiming* timing() { return const_cast<LeafTiming*>(std::as_const(*this).timing()); }

  /// Outgoing edges in order. A countermeasure's children are (detect, mitigate).
  std::vector<NodeId> children() const {
    if (const auto* g = std::get_if<AndGate>(&kind)) return g->children;
    if (const auto* g = std::get_if<OrGate>(&kind)) return g->children;
    if (const auto* g = std::get_if<CmGate>(&kind)) return {g->detect, g->mitigate};
    return {};
  }
};

/// Attack countermeasure tree: a node table with a single root.
struct Act {
  std::string title;
  std::vector<Node> nodes;
  NodeId root;

  std::size_t size() const { return nodes.size(); }
  const Node& node(NodeId id) const { return nodes.at(id.value); }
  Node& node(NodeId id) { return nodes.at(id.value); }

  std::optional<NodeId> find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].name == name) return NodeId{static_cast<std::uint32_t>(i)};
    }
    return std::nullopt;
  }

  template <class Kind>
  std::vector<NodeId> nodes_of() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (std::holds_alternative<Kind>(nodes[i].kind)) out.push_back(NodeId{static_cast<std::uint32_t>(i)});
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Validation

enum class DiagCode {
  UndefinedReference,
  DuplicateDefinition,
  InvalidName,
  EmptyGate,
  CycleDetected,
  RootHasParent,
  OrphanNode,
  SharedSubtree,
  CmPlacement,
  MultipleCm,
  CmWithoutAttack,
  CmChildKind,
  DefenseLeafPlacement,
  ProbabilityRange,
  HorizonRange,
  RateRange,
  InvalidInstantaneous,
};

inline std::string_view to_string(DiagCode code) {
  switch (code) {
    case DiagCode::UndefinedReference: return "UndefinedReference";
    case DiagCode::DuplicateDefinition: return "DuplicateDefinition";
    case DiagCode::InvalidName: return "InvalidName";
    case DiagCode::EmptyGate: return "EmptyGate";
    case DiagCode::CycleDetected: return "CycleDetected";
    case DiagCode::RootHasParent: return "RootHasParent";
    case DiagCode::OrphanNode: return "OrphanNode";
    case DiagCode::SharedSubtree: return "SharedSubtree";
    case DiagCode::CmPlacement: return "CmPlacement";
    case DiagCode::MultipleCm: return "MultipleCm";
    case DiagCode::CmWithoutAttack: return "CmWithoutAttack";
    case DiagCode::CmChildKind: return "CmChildKind";
    case DiagCode::DefenseLeafPlacement: return "DefenseLeafPlacement";
    case DiagCode::ProbabilityRange: return "ProbabilityRange";
    case DiagCode::HorizonRange: return "HorizonRange";
    case DiagCode::RateRange: return "RateRange";
    case DiagCode::InvalidInstantaneous: return "InvalidInstantaneous";
  }
  return "Unknown";
}

struct Diagnostic {
  DiagCode code;
  std::string node;
  std::string message;

  std::string str() const {
    return std::string(to_string(code)) + ": " + (node.empty() ? "" : "node '" + node + "': ") + message;
  }
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& diags) {
    std::string s = "invalid attack countermeasure tree";
    for (const auto& d : diags) s += "\n  " + d.str();
    return s;
  }
  std::vector<Diagnostic> diagnostics_;
};

inline bool is_identifier(std::string_view s) {
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (s.empty() || !alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

namespace detail {

inline void check_timing(const Node& n, bool is_mitigation, std::vector<Diagnostic>& out) {
  const LeafTiming& t = *n.timing();
  if (!(t.p >= 0.0 && t.p <= 1.0)) {
    out.push_back({DiagCode::ProbabilityRange, n.name, "probability must lie in [0,1]"});
  }
  if (t.instantaneous) {
    if (!is_mitigation) {
      out.push_back({DiagCode::InvalidInstantaneous, n.name, "only mitigation events may be instantaneous"});
    }
    return;
  }
  if (t.rate) {
    if (!std::isfinite(*t.rate) || *t.rate < 0.0) {
      out.push_back({DiagCode::RateRange, n.name, "rate must be finite and non-negative"});
    }
  } else if (!(t.horizon > 0.0) || !std::isfinite(t.horizon)) {
    out.push_back({DiagCode::HorizonRange, n.name, "time horizon must be positive and finite"});
  }
}

}  // namespace detail

/// Checks every structural and parameter invariant of an Act.
/// Returns one diagnostic per violation; empty means valid.
inline std::vector<Diagnostic> validate_act(const Act& act) {
  std::vector<Diagnostic> out;
  const std::size_t n = act.nodes.size();
  if (n == 0) {
    out.push_back({DiagCode::UndefinedReference, "", "tree has no nodes"});
    return out;
  }
  if (act.root.value >= n) {
    out.push_back({DiagCode::UndefinedReference, "", "root does not refer to a node"});
    return out;
  }

  auto valid = [&](NodeId id) { return id.value < n; };
  std::vector<std::vector<NodeId>> parents(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = act.nodes[i];
    if (!is_identifier(node.name)) {
      out.push_back({DiagCode::InvalidName, node.name, "names must match [A-Za-z_][A-Za-z0-9_]*"});
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (act.nodes[j].name == node.name) {
        out.push_back({DiagCode::DuplicateDefinition, node.name, "name is used by more than one node"});
        break;
      }
    }
    const NodeId self{static_cast<std::uint32_t>(i)};
    for (NodeId c : node.children()) {
      if (!valid(c)) {
        out.push_back({DiagCode::UndefinedReference, node.name, "child index out of range"});
        continue;
      }
      if (std::find(parents[c.value].begin(), parents[c.value].end(), self) == parents[c.value].end()) {
        parents[c.value].push_back(self);
      } else {
        out.push_back({DiagCode::SharedSubtree, act.nodes[c.value].name, "child listed twice under '" + node.name + "'"});
      }
    }
    if (std::holds_alternative<AndGate>(node.kind) || std::holds_alternative<OrGate>(node.kind)) {
      if (node.children().empty()) out.push_back({DiagCode::EmptyGate, node.name, "gate has no children"});
    }
    if (std::holds_alternative<AttackLeaf>(node.kind)) detail::check_timing(node, false, out);
    if (std::holds_alternative<DetectLeaf>(node.kind)) detail::check_timing(node, false, out);
    if (std::holds_alternative<MitigateLeaf>(node.kind)) detail::check_timing(node, true, out);
  }

  // Cycles: iterative three-colour DFS over every node.
  {
    std::vector<int> colour(n, 0);
    std::vector<bool> reported(n, false);
    for (std::size_t start = 0; start < n; ++start) {
      if (colour[start]) continue;
      std::vector<std::pair<std::uint32_t, std::size_t>> stack{{static_cast<std::uint32_t>(start), 0}};
      colour[start] = 1;
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        const auto kids = act.nodes[v].children();
        if (next < kids.size()) {
          NodeId c = kids[next++];
          if (!valid(c)) continue;
          if (colour[c.value] == 1) {
            if (!reported[c.value]) {
              reported[c.value] = true;
              out.push_back({DiagCode::CycleDetected, act.nodes[c.value].name,
                             "node is its own ancestor (via '" + act.nodes[v].name + "')"});
            }
          } else if (colour[c.value] == 0) {
            colour[c.value] = 1;
            stack.emplace_back(c.value, 0);
          }
        } else {
          colour[v] = 2;
          stack.pop_back();
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = act.nodes[i];
    const bool is_root = i == act.root.value;
    if (is_root && !parents[i].empty()) {
      out.push_back({DiagCode::RootHasParent, node.name, "the root must not have a parent"});
    }
    if (!is_root && parents[i].empty()) {
      out.push_back({DiagCode::OrphanNode, node.name, "node is not reachable from the root"});
    }
    if (parents[i].size() > 1) {
      out.push_back({DiagCode::SharedSubtree, node.name,
                     "node has " + std::to_string(parents[i].size()) + " parents; only trees are supported"});
    }

    auto parent_is_cm = [&] {
      return !parents[i].empty() &&
             std::all_of(parents[i].begin(), parents[i].end(),
                         [&](NodeId p) { return std::holds_alternative<CmGate>(act.node(p).kind); });
    };
    if (std::holds_alternative<CmGate>(node.kind)) {
      const bool under_and =
          !parents[i].empty() && std::all_of(parents[i].begin(), parents[i].end(), [&](NodeId p) {
            return std::holds_alternative<AndGate>(act.node(p).kind);
          });
      if (!under_and) out.push_back({DiagCode::CmPlacement, node.name, "countermeasures must be children of an AND gate"});
      const auto& cm = std::get<CmGate>(node.kind);
      if (!valid(cm.detect) || !std::holds_alternative<DetectLeaf>(act.node(cm.detect).kind)) {
        out.push_back({DiagCode::CmChildKind, node.name, "first countermeasure child must be a DETECT event"});
      }
      if (!valid(cm.mitigate) || !std::holds_alternative<MitigateLeaf>(act.node(cm.mitigate).kind)) {
        out.push_back({DiagCode::CmChildKind, node.name, "second countermeasure child must be a MITIGATE event"});
      }
    }
    if (std::holds_alternative<DetectLeaf>(node.kind) || std::holds_alternative<MitigateLeaf>(node.kind)) {
      if (!parent_is_cm()) {
        out.push_back({DiagCode::DefenseLeafPlacement, node.name,
                       "detection and mitigation events may only appear under a countermeasure"});
      }
    }
    if (const auto* g = std::get_if<AndGate>(&node.kind)) {
      std::size_t cms = 0;
      for (NodeId c : g->children) {
        if (valid(c) && std::holds_alternative<CmGate>(act.node(c).kind)) ++cms;
      }
      if (cms > 1) out.push_back({DiagCode::MultipleCm, node.name, "an AND gate may guard at most one countermeasure"});
      if (cms > 0 && cms == g->children.size()) {
        out.push_back({DiagCode::CmWithoutAttack, node.name, "a countermeasure needs at least one attack sibling"});
      }
    }
  }
  return out;
}

inline void ensure_valid(const Act& act) {
  auto diags = validate_act(act);
  if (!diags.empty()) throw ValidationError(std::move(diags));
}

/// Countermeasure child of an AND gate, if any.
inline std::optional<NodeId> guarding_cm(const Act& act, const AndGate& gate) {
  for (NodeId c : gate.children) {
    if (std::holds_alternative<CmGate>(act.node(c).kind)) return c;
  }
  return std::nullopt;
}

/// Structural equality: same title, same root shape, same names, labels and annotations,
/// independent of the order of the node table.
inline bool structurally_equal(const Act& a, const Act& b) {
  if (a.title != b.title || a.size() != b.size()) return false;
  auto same = [&](auto&& self, NodeId x, NodeId y) -> bool {
    const Node& nx = a.node(x);
    const Node& ny = b.node(y);
    if (nx.name != ny.name || nx.label != ny.label || nx.kind.index() != ny.kind.index()) return false;
    if (nx.is_leaf()) return *nx.timing() == *ny.timing();
    const auto cx = nx.children();
    const auto cy = ny.children();
    if (cx.size() != cy.size()) return false;
    for (std::size_t i = 0; i < cx.size(); ++i) {
      if (!self(self, cx[i], cy[i])) return false;
    }
    return true;
  };
  return same(same, a.root, b.root);
}

}  // namespace actree
