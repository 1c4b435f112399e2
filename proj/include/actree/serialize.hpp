#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "actree/model.hpp"

namespace actree {

/// Shortest decimal spelling that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace detail {

inline std::string params(const LeafTiming& t) {
  std::string s = "(p=" + format_double(t.p);
  if (t.instantaneous) {
    s += ", lambda=inf";
  } else if (t.rate) {
    s += ", lambda=" + format_double(*t.rate);
  } else {
    s += ", t=" + format_double(t.horizon);
  }
  return s + ")";
}

inline std::string expression(const Act& act, const Node& node) {
  auto names = [&](const std::vector<NodeId>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ", ";
      s += act.node(ids[i]).name;
    }
    return s;
  };
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AndGate>) return "AND(" + names(k.children) + ")";
        else if constexpr (std::is_same_v<K, OrGate>) return "OR(" + names(k.children) + ")";
        else if constexpr (std::is_same_v<K, CmGate>) return "CM(" + names({k.detect, k.mitigate}) + ")";
        else if constexpr (std::is_same_v<K, AttackLeaf>) return "ATTACK" + params(k.timing);
        else if constexpr (std::is_same_v<K, DetectLeaf>) return "DETECT" + params(k.timing);
        else return "MITIGATE" + params(k.timing);
      },
      node.kind);
}

}  // namespace detail

/// Canonical DSL text: definitions in pre-order from the root, one per line.
inline std::string serialize_act(const Act& act) {
  std::string out = "act " + quote(act.title) + " {\n";
  out += "  root " + act.node(act.root).name + ";\n";
  std::vector<NodeId> stack{act.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& node = act.node(id);
    out += "  " + node.name;
    if (!node.label.empty()) out += " " + quote(node.label);
    out += " = " + detail::expression(act, node) + ";\n";
    const auto kids = node.children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  out += "}\n";
  return out;
}

}  // namespace actree
