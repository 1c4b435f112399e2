#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actree/model.hpp"
#include "actree/timing.hpp"

namespace actree {

enum class Signal : std::uint8_t { Activate, Success };
enum class Direction : std::uint8_t { Input, Output };

/// `act(v)?`, `success(v)!` and so on. Actions synchronise on (signal, node).
struct Action {
  Signal signal;
  NodeId node;
  Direction direction;

  bool matches(const Action& other) const { return signal == other.signal && node == other.node; }
  friend bool operator==(const Action&, const Action&) = default;
};

inline std::string to_string(const Action& a) {
  return std::string(a.signal == Signal::Activate ? "act" : "success") + "(" + std::to_string(a.node.value) + ")" +
         (a.direction == Direction::Input ? "?" : "!");
}

/// Interactive Markov chain of a single tree node.
struct Imc {
  using State = std::uint16_t;

  struct Interactive {
    State from;
    Action action;
    State to;
  };
  struct Markovian {
    State from;
    double rate;
    State to;
  };

  NodeId node;
  State states = 0;
  State initial = 0;
  std::vector<Interactive> interactive;
  std::vector<Markovian> markovian;
  std::vector<bool> accepting;

  State add_state() {
    accepting.push_back(false);
    return states++;
  }
};

/// q0 --act?--> q1 --rate--> q2 --success!--> q3 (accepting).
inline Imc bas_imc(NodeId node, Rate rate) {
  Imc m;
  m.node = node;
  for (int i = 0; i < 4; ++i) m.add_state();
  m.interactive.push_back({0, {Signal::Activate, node, Direction::Input}, 1});
  m.markovian.push_back({1, rate.per_hour(), 2});
  m.interactive.push_back({2, {Signal::Success, node, Direction::Output}, 3});
  m.accepting[3] = true;
  return m;
}

enum class GateKind { And, Or };

/// AND/OR gate over ordered children.
///
/// On activation the gate activates each child left to right (and the
/// guarding countermeasure last, if any). AND tracks the subset of children
/// that have succeeded and accepts once all have; OR accepts on the first
/// child success, remembering which child it was. The accepting state then
/// emits the gate's own success signal. A countermeasure success arriving
/// before an AND gate has accepted moves it to a dead state.
inline Imc gate_imc(NodeId node, GateKind kind, std::span<const NodeId> children,
                    std::optional<NodeId> countermeasure = std::nullopt) {
  if (children.empty()) throw DomainError("gate needs at least one child");
  if (kind == GateKind::Or && countermeasure) throw DomainError("countermeasures guard AND gates only");
  if (kind == GateKind::And && children.size() > 12) throw DomainError("AND gate too wide for the IMC construction");

  Imc m;
  m.node = node;
  const Imc::State start = m.add_state();
  Imc::State cur = m.add_state();
  m.interactive.push_back({start, {Signal::Activate, node, Direction::Input}, cur});
  for (NodeId c : children) {
    const Imc::State next = m.add_state();
    m.interactive.push_back({cur, {Signal::Activate, c, Direction::Output}, next});
    cur = next;
  }
  if (countermeasure) {
    const Imc::State next = m.add_state();
    m.interactive.push_back({cur, {Signal::Activate, *countermeasure, Direction::Output}, next});
    cur = next;
  }
  const Imc::State waiting = cur;
  const std::size_t n = children.size();

  if (kind == GateKind::And) {
    // waiting state is the empty subset; allocate the others in mask order.
    std::vector<Imc::State> subset(std::size_t{1} << n);
    subset[0] = waiting;
    for (std::size_t mask = 1; mask < subset.size(); ++mask) subset[mask] = m.add_state();
    const std::size_t full = subset.size() - 1;
    std::optional<Imc::State> dead;
    if (countermeasure) dead = m.add_state();
    for (std::size_t mask = 0; mask < full; ++mask) {
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::size_t{1} << i)) continue;
        m.interactive.push_back(
            {subset[mask], {Signal::Success, children[i], Direction::Input}, subset[mask | (std::size_t{1} << i)]});
      }
      if (dead) m.interactive.push_back({subset[mask], {Signal::Success, *countermeasure, Direction::Input}, *dead});
    }
    const Imc::State done = m.add_state();
    m.interactive.push_back({subset[full], {Signal::Success, node, Direction::Output}, done});
    m.accepting[subset[full]] = m.accepting[done] = true;
  } else {
    std::vector<Imc::State> first(n);
    for (auto& s : first) s = m.add_state();
    const Imc::State done = m.add_state();
    for (std::size_t i = 0; i < n; ++i) {
      m.interactive.push_back({waiting, {Signal::Success, children[i], Direction::Input}, first[i]});
      m.interactive.push_back({first[i], {Signal::Success, node, Direction::Output}, done});
      m.accepting[first[i]] = true;
    }
    m.accepting[done] = true;
  }
  return m;
}

/// Countermeasure: detection then mitigation, each an exponential phase,
/// then a success signal (the defender has blocked the attack). With no
/// mitigation rate the mitigation is instantaneous and only one phase remains.
inline Imc cm_imc(NodeId node, Rate detect, std::optional<Rate> mitigate) {
  Imc m;
  m.node = node;
  const Imc::State q0 = m.add_state();
  const Imc::State q1 = m.add_state();
  m.interactive.push_back({q0, {Signal::Activate, node, Direction::Input}, q1});
  Imc::State cur = m.add_state();
  m.markovian.push_back({q1, detect.per_hour(), cur});
  if (mitigate) {
    const Imc::State next = m.add_state();
    m.markovian.push_back({cur, mitigate->per_hour(), next});
    cur = next;
  }
  const Imc::State done = m.add_state();
  m.interactive.push_back({cur, {Signal::Success, node, Direction::Output}, done});
  m.accepting[done] = true;
  return m;
}

}  // namespace actree
