#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "actree/curve.hpp"
#include "actree/model.hpp"
#include "actree/rng.hpp"
#include "actree/scenario.hpp"
#include "actree/serialize.hpp"

namespace actree {

struct SimulationOptions {
  std::uint64_t runs = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

/// Flattened tree evaluated by completion-time arithmetic:
/// leaf = its exponential sample, AND = max of attack children (infinite if a
/// guarding countermeasure finishes first), OR = min, countermeasure =
/// detection + mitigation.
class CompletionTimeModel {
 public:
  explicit CompletionTimeModel(const Act& model) { flatten(model, model.root); }

  double sample_root(SplitMix64& rng, std::vector<double>& time) const {
    time.resize(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& op = ops_[i];
      switch (op.kind) {
        case Op::Leaf: time[i] = rng.exponential(op.rate); break;
        case Op::Cm:
          time[i] = rng.exponential(op.rate);
          if (!op.instant_second) time[i] += rng.exponential(op.rate2);
          break;
        case Op::And: {
          double t = 0.0;
          for (std::size_t c : op.children) t = std::max(t, time[c]);
          if (op.guard && !(t < time[*op.guard])) t = kNever;
          time[i] = t;
          break;
        }
        case Op::Or: {
          double t = kNever;
          for (std::size_t c : op.children) t = std::min(t, time[c]);
          time[i] = t;
          break;
        }
      }
    }
    return time.back();
  }

 private:
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  struct Op {
    enum Kind { Leaf, Cm, And, Or } kind;
    double rate = 0.0;
    double rate2 = 0.0;
    bool instant_second = false;
    std::vector<std::size_t> children;
    std::optional<std::size_t> guard;
  };

  std::size_t flatten(const Act& model, NodeId id) {
    const Node& n = model.node(id);
    Op op{Op::Leaf};
    if (const auto* a = std::get_if<AttackLeaf>(&n.kind)) {
      op.rate = a->timing.timed_rate().per_hour();
    } else if (const auto* cm = std::get_if<CmGate>(&n.kind)) {
      op.kind = Op::Cm;
      op.rate = std::get<DetectLeaf>(model.node(cm->detect).kind).timing.timed_rate().per_hour();
      const auto& mt = std::get<MitigateLeaf>(model.node(cm->mitigate).kind).timing;
      op.instant_second = mt.instantaneous;
      if (!mt.instantaneous) op.rate2 = mt.timed_rate().per_hour();
    } else if (const auto* g = std::get_if<AndGate>(&n.kind)) {
      op.kind = Op::And;
      for (NodeId c : g->children) {
        const std::size_t k = flatten(model, c);
        if (std::holds_alternative<CmGate>(model.node(c).kind)) op.guard = k;
        else op.children.push_back(k);
      }
    } else if (const auto* g = std::get_if<OrGate>(&n.kind)) {
      op.kind = Op::Or;
      for (NodeId c : g->children) op.children.push_back(flatten(model, c));
    }
    ops_.push_back(std::move(op));
    return ops_.size() - 1;
  }

  std::vector<Op> ops_;
};

}  // namespace detail

/// Monte Carlo estimate of P(root succeeded by t) with 3-sigma half-widths.
/// Deterministic for a fixed (seed, runs, grid) regardless of thread count.
inline CurveResult simulate(const Act& act, Scenario scenario, std::span<const double> times,
                            const SimulationOptions& options) {
  ensure_valid(act);
  check_time_grid(times);
  if (options.runs == 0) throw DomainError("simulation needs at least one run");

  const Act model = apply_scenario(act, scenario);
  const detail::CompletionTimeModel tree(model);
  const std::vector<double> grid(times.begin(), times.end());

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, options.runs));

  // first_hit[i]: runs whose root completion time falls in (grid[i-1], grid[i]].
  std::vector<std::vector<std::uint64_t>> first_hit(threads, std::vector<std::uint64_t>(grid.size() + 1, 0));
  auto work = [&](unsigned w) {
    const std::uint64_t begin = options.runs * w / threads;
    const std::uint64_t end = options.runs * (w + 1) / threads;
    std::vector<double> scratch;
    for (std::uint64_t r = begin; r < end; ++r) {
      SplitMix64 rng = SplitMix64::substream(options.seed, r);
      const double t = tree.sample_root(rng, scratch);
      const auto idx = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
      ++first_hit[w][idx];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  CurveResult out;
  out.xs = grid;
  out.scenario = std::string(to_string(scenario));
  out.meta["solver"] = "monte-carlo";
  out.meta["runs"] = std::to_string(options.runs);
  out.meta["seed"] = std::to_string(options.seed);
  out.meta["rng"] = SplitMix64::kName;
  out.meta["title"] = act.title;
  const double n = static_cast<double>(options.runs);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (const auto& h : first_hit) hits += h[i];
    const double p = static_cast<double>(hits) / n;
    out.ys.push_back(p);
    out.half_width.push_back(3.0 * std::sqrt(p * (1.0 - p) / n));
  }
  return out;
}

}  // namespace actree
