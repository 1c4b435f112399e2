#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "actree/ctmc.hpp"
#include "actree/error.hpp"
#include "actree/imc.hpp"
#include "actree/model.hpp"
#include "actree/scenario.hpp"

namespace actree {

struct ComposeOptions {
  std::size_t max_states = 1'000'000;
  /// IMC product only: explore every interleaving of immediate transitions
  /// and require them to meet in one tangible state.
  bool check_confluence = true;
};

namespace detail {

/// Collapses goal states into one absorbing goal and blocked states into one
/// absorbing blocked state, drops states unreachable from init, renumbers in
/// BFS order.
inline Ctmc finalize_ctmc(std::size_t n, StateIndex init, const std::vector<Transition>& edges,
                          const std::vector<bool>& goal, const std::vector<bool>& blocked) {
  constexpr StateIndex kNone = ~StateIndex{0};
  std::vector<std::vector<Transition>> out(n);
  for (const auto& t : edges) {
    if (!goal[t.src] && !blocked[t.src]) out[t.src].push_back(t);
  }
  std::vector<StateIndex> rep(n);
  std::optional<StateIndex> goal_rep, blocked_rep;
  for (StateIndex s = 0; s < n; ++s) {
    rep[s] = s;
    if (goal[s]) rep[s] = goal_rep ? *goal_rep : *(goal_rep = s);
    if (blocked[s]) rep[s] = blocked_rep ? *blocked_rep : *(blocked_rep = s);
  }
  std::vector<StateIndex> fresh(n, kNone);
  std::vector<StateIndex> order;
  std::queue<StateIndex> q;
  fresh[rep[init]] = 0;
  order.push_back(rep[init]);
  q.push(rep[init]);
  std::vector<Transition> kept;
  while (!q.empty()) {
    const StateIndex s = q.front();
    q.pop();
    for (const auto& t : out[s]) {
      const StateIndex d = rep[t.dst];
      if (fresh[d] == kNone) {
        fresh[d] = static_cast<StateIndex>(order.size());
        order.push_back(d);
        q.push(d);
      }
      kept.push_back({fresh[s], fresh[d], t.rate});
    }
  }
  std::vector<bool> g(order.size()), b(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    g[i] = goal[order[i]];
    b[i] = blocked[order[i]];
  }
  return Ctmc(order.size(), 0, std::move(kept), std::move(g), std::move(b));
}

/// Direct construction: a state records how many exponential phases each
/// timed element (attack leaf, countermeasure) has completed.
class LeafStatusBuilder {
 public:
  enum class Status : std::uint8_t { Pending, Succeeded, Failed };

  explicit LeafStatusBuilder(const Act& model) : model_(model), element_of_(model.size(), -1) {
    parent_.assign(model.size(), std::nullopt);
    for (std::size_t i = 0; i < model.size(); ++i) {
      for (NodeId c : model.nodes[i].children()) parent_[c.value] = NodeId{static_cast<std::uint32_t>(i)};
    }
    post_order(model.root);
    for (NodeId id : order_) {
      const Node& n = model.node(id);
      Element e{id, {}, {}};
      if (const auto* a = std::get_if<AttackLeaf>(&n.kind)) {
        e.phases.push_back(a->timing.timed_rate().per_hour());
      } else if (const auto* cm = std::get_if<CmGate>(&n.kind)) {
        e.phases.push_back(std::get<DetectLeaf>(model.node(cm->detect).kind).timing.timed_rate().per_hour());
        const auto& mt = std::get<MitigateLeaf>(model.node(cm->mitigate).kind).timing;
        if (!mt.instantaneous) e.phases.push_back(mt.timed_rate().per_hour());
      } else {
        continue;
      }
      for (auto p = parent_[id.value]; p; p = parent_[p->value]) e.ancestors.push_back(*p);
      element_of_[id.value] = static_cast<int>(elements_.size());
      elements_.push_back(std::move(e));
    }
  }

  Ctmc build(std::size_t max_states) const {
    std::unordered_map<std::string, StateIndex> index;
    std::vector<std::string> states;
    std::vector<bool> goal, blocked;
    std::vector<Transition> edges;
    std::optional<StateIndex> goal_state, blocked_state;
    std::vector<Status> status(model_.size()), scratch(model_.size());

    auto intern = [&](const std::string& s) -> StateIndex {
      evaluate(s, scratch);
      const Status root = scratch[model_.root.value];
      if (root == Status::Succeeded && goal_state) return *goal_state;
      if (root == Status::Failed && blocked_state) return *blocked_state;
      if (root == Status::Pending) {
        if (auto it = index.find(s); it != index.end()) return it->second;
      }
      if (states.size() >= max_states) throw StateSpaceLimit(max_states);
      const auto id = static_cast<StateIndex>(states.size());
      states.push_back(s);
      goal.push_back(root == Status::Succeeded);
      blocked.push_back(root == Status::Failed);
      if (root == Status::Succeeded) goal_state = id;
      else if (root == Status::Failed) blocked_state = id;
      else index.emplace(s, id);
      return id;
    };

    const StateIndex init = intern(std::string(elements_.size(), '\0'));
    for (StateIndex cur = 0; cur < states.size(); ++cur) {
      if (goal[cur] || blocked[cur]) continue;
      const std::string s = states[cur];
      evaluate(s, status);
      for (std::size_t e = 0; e < elements_.size(); ++e) {
        const double rate = enabled_rate(e, s, status);
        if (rate <= 0.0) continue;
        std::string next = s;
        ++next[e];
        edges.push_back({cur, intern(next), rate});
      }
    }
    return finalize_ctmc(states.size(), init, edges, goal, blocked);
  }

 private:
  struct Element {
    NodeId node;
    std::vector<double> phases;
    std::vector<NodeId> ancestors;
  };

  void post_order(NodeId id) {
    for (NodeId c : model_.node(id).children()) post_order(c);
    order_.push_back(id);
  }

  double enabled_rate(std::size_t e, const std::string& s, const std::vector<Status>& status) const {
    const Element& el = elements_[e];
    const auto done = static_cast<std::size_t>(s[e]);
    if (done >= el.phases.size()) return 0.0;
    for (NodeId a : el.ancestors) {
      if (status[a.value] != Status::Pending) return 0.0;  // outcome above is already decided
    }
    return el.phases[done];
  }

  void evaluate(const std::string& s, std::vector<Status>& status) const {
    for (NodeId id : order_) {
      const Node& n = model_.node(id);
      Status& out = status[id.value];
      const int e = element_of_[id.value];
      if (e >= 0) {
        const Element& el = elements_[static_cast<std::size_t>(e)];
        const auto done = static_cast<std::size_t>(s[static_cast<std::size_t>(e)]);
        if (done == el.phases.size()) out = Status::Succeeded;
        else if (el.phases[done] == 0.0) out = Status::Failed;  // never completes
        else out = Status::Pending;
      } else if (const auto* g = std::get_if<AndGate>(&n.kind)) {
        bool all = true, any_failed = false, cm_done = false;
        for (NodeId c : g->children) {
          const Status cs = status[c.value];
          if (std::holds_alternative<CmGate>(model_.node(c).kind)) {
            cm_done = cs == Status::Succeeded;
            continue;
          }
          all = all && cs == Status::Succeeded;
          any_failed = any_failed || cs == Status::Failed;
        }
        out = any_failed || cm_done ? Status::Failed : all ? Status::Succeeded : Status::Pending;
      } else if (const auto* g = std::get_if<OrGate>(&n.kind)) {
        bool any = false, all_failed = true;
        for (NodeId c : g->children) {
          any = any || status[c.value] == Status::Succeeded;
          all_failed = all_failed && status[c.value] == Status::Failed;
        }
        out = any ? Status::Succeeded : all_failed ? Status::Failed : Status::Pending;
      } else {
        out = Status::Pending;  // detection/mitigation events are folded into their countermeasure
      }
    }
  }

  const Act& model_;
  std::vector<int> element_of_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<NodeId> order_;
  std::vector<Element> elements_;
};

/// Parallel composition of per-node IMCs under maximal progress.
class ImcProductBuilder {
 public:
  using Local = std::vector<Imc::State>;

  ImcProductBuilder(const Act& model, const ComposeOptions& options) : model_(model), options_(options) {
    for (std::size_t i = 0; i < model.size(); ++i) {
      const NodeId id{static_cast<std::uint32_t>(i)};
      const Node& n = model.nodes[i];
      if (const auto* a = std::get_if<AttackLeaf>(&n.kind)) {
        add(bas_imc(id, a->timing.timed_rate()));
      } else if (const auto* g = std::get_if<AndGate>(&n.kind)) {
        std::vector<NodeId> kids;
        for (NodeId c : g->children) {
          if (!std::holds_alternative<CmGate>(model.node(c).kind)) kids.push_back(c);
        }
        add(gate_imc(id, GateKind::And, kids, guarding_cm(model, *g)));
      } else if (const auto* g = std::get_if<OrGate>(&n.kind)) {
        add(gate_imc(id, GateKind::Or, g->children));
      } else if (const auto* cm = std::get_if<CmGate>(&n.kind)) {
        const Rate detect = std::get<DetectLeaf>(model.node(cm->detect).kind).timing.timed_rate();
        const auto& mt = std::get<MitigateLeaf>(model.node(cm->mitigate).kind).timing;
        add(cm_imc(id, detect, mt.instantaneous ? std::nullopt : std::optional<Rate>(mt.timed_rate())));
      }
    }
    for (std::size_t c = 0; c < imcs_.size(); ++c) {
      if (imcs_[c].node == model.root) root_ = c;
      for (const auto& t : imcs_[c].interactive) {
        if (t.action.direction == Direction::Input) listeners_[key(t.action)].insert(c);
      }
    }
  }

  const std::vector<Imc>& components() const { return imcs_; }

  Ctmc build() const {
    Local start(imcs_.size());
    for (std::size_t c = 0; c < imcs_.size(); ++c) start[c] = imcs_[c].initial;
    // The environment activates the root at time zero.
    deliver(start, root_, {Signal::Activate, model_.root, Direction::Input});
    start = close(start);

    std::map<Local, StateIndex> index;
    std::vector<Local> states;
    std::vector<Transition> edges;
    auto intern = [&](const Local& s) {
      if (auto it = index.find(s); it != index.end()) return it->second;
      if (states.size() >= options_.max_states) throw StateSpaceLimit(options_.max_states);
      const auto id = static_cast<StateIndex>(states.size());
      index.emplace(s, id);
      states.push_back(s);
      return id;
    };
    const StateIndex init = intern(start);
    std::vector<bool> goal;
    for (StateIndex cur = 0; cur < states.size(); ++cur) {
      const Local s = states[cur];
      goal.push_back(imcs_[root_].accepting[s[root_]]);
      if (goal.back()) continue;
      for (std::size_t c = 0; c < imcs_.size(); ++c) {
        for (const auto& t : imcs_[c].markovian) {
          if (t.from != s[c] || !(t.rate > 0.0)) continue;
          Local next = s;
          next[c] = t.to;
          edges.push_back({cur, intern(close(next)), t.rate});
        }
      }
    }

    // Blocked: tangible states from which the goal is unreachable.
    std::vector<std::vector<StateIndex>> preds(states.size());
    for (const auto& t : edges) preds[t.dst].push_back(t.src);
    std::vector<bool> reaches(states.size(), false);
    std::queue<StateIndex> q;
    for (StateIndex s = 0; s < states.size(); ++s) {
      if (goal[s]) {
        reaches[s] = true;
        q.push(s);
      }
    }
    while (!q.empty()) {
      const StateIndex s = q.front();
      q.pop();
      for (StateIndex p : preds[s]) {
        if (!reaches[p]) {
          reaches[p] = true;
          q.push(p);
        }
      }
    }
    std::vector<bool> blocked(states.size());
    for (StateIndex s = 0; s < states.size(); ++s) blocked[s] = !reaches[s];
    return finalize_ctmc(states.size(), init, edges, goal, blocked);
  }

 private:
  static std::uint64_t key(const Action& a) { return std::uint64_t{a.node.value} * 2 + static_cast<std::uint64_t>(a.signal); }

  void add(Imc m) { imcs_.push_back(std::move(m)); }

  void deliver(Local& s, std::size_t c, const Action& a) const {
    for (const auto& t : imcs_[c].interactive) {
      if (t.from == s[c] && t.action.direction == Direction::Input && t.action.matches(a)) {
        s[c] = t.to;
        return;
      }
    }
    // Inputs that are not enabled are ignored.
  }

  /// Outputs enabled in `s`, as (component, transition index).
  std::vector<std::pair<std::size_t, std::size_t>> outputs(const Local& s) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t c = 0; c < imcs_.size(); ++c) {
      const auto& tr = imcs_[c].interactive;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr[i].from == s[c] && tr[i].action.direction == Direction::Output) out.emplace_back(c, i);
      }
    }
    return out;
  }

  Local fire(const Local& s, std::size_t c, std::size_t i) const {
    Local next = s;
    const auto& t = imcs_[c].interactive[i];
    next[c] = t.to;
    if (auto it = listeners_.find(key(t.action)); it != listeners_.end()) {
      for (std::size_t l : it->second) {
        if (l != c) deliver(next, l, t.action);
      }
    }
    return next;
  }

  /// Maximal progress: fire immediate transitions until none is enabled.
  Local close(const Local& s) const {
    if (!options_.check_confluence) {
      Local cur = s;
      for (auto outs = outputs(cur); !outs.empty(); outs = outputs(cur)) cur = fire(cur, outs[0].first, outs[0].second);
      return cur;
    }
    std::set<Local> seen{s};
    std::vector<Local> stack{s};
    std::set<Local> tangible;
    while (!stack.empty()) {
      const Local cur = std::move(stack.back());
      stack.pop_back();
      const auto outs = outputs(cur);
      if (outs.empty()) {
        tangible.insert(cur);
        continue;
      }
      for (auto [c, i] : outs) {
        Local next = fire(cur, c, i);
        if (seen.insert(next).second) stack.push_back(std::move(next));
      }
    }
    if (tangible.size() != 1) {
      throw NonConfluent("immediate transitions reach " + std::to_string(tangible.size()) + " distinct stable states");
    }
    return *tangible.begin();
  }

  const Act& model_;
  ComposeOptions options_;
  std::vector<Imc> imcs_;
  std::size_t root_ = 0;
  std::unordered_map<std::uint64_t, std::set<std::size_t>> listeners_;
};

}  // namespace detail

/// Absorbing CTMC of a scenario, built directly from leaf and countermeasure
/// completion status. Equivalent to compose_imc_product() but much smaller:
/// only elements whose completion can still change the root outcome move.
inline Ctmc compose(const Act& act, Scenario scenario, const ComposeOptions& options = {}) {
  ensure_valid(act);
  const Act model = apply_scenario(act, scenario);
  return detail::LeafStatusBuilder(model).build(options.max_states);
}

/// Absorbing CTMC obtained as the parallel product of the per-node IMCs,
/// synchronised on activation/success signals and closed under maximal
/// progress. Intended for cross-checking compose() on small models.
inline Ctmc compose_imc_product(const Act& act, Scenario scenario, const ComposeOptions& options = {}) {
  ensure_valid(act);
  const Act model = apply_scenario(act, scenario);
  return detail::ImcProductBuilder(model, options).build();
}

}  // namespace actree
