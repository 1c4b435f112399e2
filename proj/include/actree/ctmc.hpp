#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "actree/error.hpp"
#include "actree/serialize.hpp"

namespace actree {

using StateIndex = std::uint32_t;

struct Transition {
  StateIndex src;
  StateIndex dst;
  double rate;  // per hour

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Absorbing continuous-time Markov chain with a goal set (root succeeded)
/// and a blocked set (root can never succeed). Transitions are stored in
/// compressed rows sorted by (src, dst); parallel edges are merged.
class Ctmc {
 public:
  Ctmc() = default;

  Ctmc(std::size_t states, StateIndex init, std::vector<Transition> transitions, std::vector<bool> goal,
       std::vector<bool> blocked)
      : init_(init), goal_(std::move(goal)), blocked_(std::move(blocked)) {
    if (states == 0 || init >= states) throw DomainError("CTMC initial state out of range");
    if (goal_.size() != states || blocked_.size() != states) throw DomainError("CTMC state flags have wrong size");
    for (const auto& t : transitions) {
      if (t.src >= states || t.dst >= states) throw DomainError("CTMC transition endpoint out of range");
      if (!(t.rate > 0.0) || !std::isfinite(t.rate)) throw DomainError("CTMC rates must be positive and finite");
    }
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& a, const Transition& b) { return a.src != b.src ? a.src < b.src : a.dst < b.dst; });
    for (const auto& t : transitions) {
      if (t.src == t.dst) continue;  // self-loops do not change the distribution
      if (!edges_.empty() && edges_.back().src == t.src && edges_.back().dst == t.dst) {
        edges_.back().rate += t.rate;
      } else {
        edges_.push_back(t);
      }
    }
    row_.assign(states + 1, 0);
    for (const auto& t : edges_) ++row_[t.src + 1];
    for (std::size_t s = 0; s < states; ++s) row_[s + 1] += row_[s];
  }

  std::size_t size() const { return goal_.size(); }
  StateIndex init() const { return init_; }
  bool goal(StateIndex s) const { return goal_[s]; }
  bool blocked(StateIndex s) const { return blocked_[s]; }
  const std::vector<bool>& goal_flags() const { return goal_; }
  const std::vector<bool>& blocked_flags() const { return blocked_; }

  std::span<const Transition> transitions() const { return edges_; }
  std::span<const Transition> out(StateIndex s) const {
    return std::span<const Transition>(edges_).subspan(row_[s], row_[s + 1] - row_[s]);
  }

  double exit_rate(StateIndex s) const {
    double r = 0.0;
    for (const auto& t : out(s)) r += t.rate;
    return r;
  }

  std::size_t count_goal() const { return static_cast<std::size_t>(std::count(goal_.begin(), goal_.end(), true)); }
  std::size_t count_blocked() const {
    return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), true));
  }

 private:
  StateIndex init_ = 0;
  std::vector<bool> goal_;
  std::vector<bool> blocked_;
  std::vector<Transition> edges_;
  std::vector<std::size_t> row_;
};

/// Violations of the composed-model invariants; empty when all hold.
inline std::vector<std::string> check_ctmc(const Ctmc& c) {
  std::vector<std::string> problems;
  std::vector<bool> seen(c.size(), false);
  std::queue<StateIndex> q;
  q.push(c.init());
  seen[c.init()] = true;
  while (!q.empty()) {
    const StateIndex s = q.front();
    q.pop();
    for (const auto& t : c.out(s)) {
      if (!seen[t.dst]) {
        seen[t.dst] = true;
        q.push(t.dst);
      }
    }
  }
  for (StateIndex s = 0; s < c.size(); ++s) {
    if (!seen[s]) problems.push_back("state " + std::to_string(s) + " is unreachable");
    if (c.goal(s) && c.blocked(s)) problems.push_back("state " + std::to_string(s) + " is both goal and blocked");
    if ((c.goal(s) || c.blocked(s)) && !c.out(s).empty()) {
      problems.push_back("absorbing state " + std::to_string(s) + " has outgoing transitions");
    }
  }
  return problems;
}

/// Plain-text transition list: header lines then one `src dst rate` per line.
inline std::string export_ctmc(const Ctmc& c) {
  std::string out = "#states " + std::to_string(c.size()) + "\n";
  out += "#init " + std::to_string(c.init()) + "\n";
  auto list = [&](const char* tag, const std::vector<bool>& flags) {
    out += tag;
    for (StateIndex s = 0; s < flags.size(); ++s) {
      if (flags[s]) out += " " + std::to_string(s);
    }
    out += "\n";
  };
  list("#goal", c.goal_flags());
  list("#blocked", c.blocked_flags());
  for (const auto& t : c.transitions()) {
    out += std::to_string(t.src) + " " + std::to_string(t.dst) + " " + format_double(t.rate) + "\n";
  }
  return out;
}

inline Ctmc import_ctmc(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t states = 0;
  bool have_states = false, have_init = false;
  StateIndex init = 0;
  std::vector<StateIndex> goal, blocked;
  std::vector<Transition> edges;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& why) {
    return DomainError("CTMC import, line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string tag;
      ls >> tag;
      std::vector<StateIndex>* target = nullptr;
      if (tag == "#states") {
        if (!(ls >> states)) throw bad("missing state count");
        have_states = true;
        continue;
      }
      if (tag == "#init") {
        if (!(ls >> init)) throw bad("missing initial state");
        have_init = true;
        continue;
      }
      if (tag == "#goal") target = &goal;
      if (tag == "#blocked") target = &blocked;
      if (!target) continue;  // free comment
      StateIndex s;
      while (ls >> s) target->push_back(s);
      continue;
    }
    Transition t{};
    if (!(ls >> t.src >> t.dst >> t.rate)) throw bad("expected `src dst rate`");
    edges.push_back(t);
  }
  if (!have_states || !have_init) throw DomainError("CTMC import: missing #states or #init header");
  std::vector<bool> g(states, false), b(states, false);
  for (StateIndex s : goal) {
    if (s >= states) throw DomainError("CTMC import: goal state out of range");
    g[s] = true;
  }
  for (StateIndex s : blocked) {
    if (s >= states) throw DomainError("CTMC import: blocked state out of range");
    b[s] = true;
  }
  return Ctmc(states, init, std::move(edges), std::move(g), std::move(b));
}

}  // namespace actree
