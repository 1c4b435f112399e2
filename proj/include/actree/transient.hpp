#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "actree/ctmc.hpp"
#include "actree/curve.hpp"
#include "actree/error.hpp"
#include "actree/serialize.hpp"

namespace actree {

/// Poisson(mean) probabilities on [left, left + weights.size()), normalised
/// so they sum to one. The truncated mass relative to the kept mass is at
/// most `tail`.
struct PoissonWindow {
  std::size_t left = 0;
  std::vector<double> weights;

  std::size_t right() const { return left + weights.size() - 1; }
};

/// Terms are generated outward from the mode with w(mode) = 1, so nothing
/// overflows and far terms underflow harmlessly. Each side stops once a
/// geometric bound on its remaining terms drops below tail/2 of the kept mass.
inline PoissonWindow poisson_window(double mean, double tail) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and >= 0");
  if (!(tail > 0.0 && tail < 1.0)) throw DomainError("Poisson tail bound must lie in (0,1)");
  if (mean == 0.0) return {0, {1.0}};

  const auto mode = static_cast<std::size_t>(std::floor(mean));
  const double half = tail / 2.0;
  double total = 1.0;

  std::vector<double> below;  // mode-1, mode-2, ...
  {
    double w = 1.0;
    for (std::size_t k = mode; k > 0; --k) {
      const double next = w * static_cast<double>(k) / mean;
      const double ratio = static_cast<double>(k - 1) / mean;
      if (next / (1.0 - ratio) <= half * total) break;
      below.push_back(next);
      total += next;
      w = next;
    }
  }
  std::vector<double> above{1.0};  // mode, mode+1, ...
  {
    double w = 1.0;
    for (std::size_t k = mode;; ++k) {
      const double next = w * mean / static_cast<double>(k + 1);
      const double ratio = mean / static_cast<double>(k + 2);
      if (ratio < 1.0 && next / (1.0 - ratio) <= half * total) break;
      above.push_back(next);
      total += next;
      w = next;
    }
  }

  PoissonWindow win;
  win.left = mode - below.size();
  win.weights.reserve(below.size() + above.size());
  for (auto it = below.rbegin(); it != below.rend(); ++it) win.weights.push_back(*it / total);
  for (double w : above) win.weights.push_back(w / total);
  return win;
}

/// P(goal reached by t) for each t, by uniformization.
///
/// With uniformization rate L >= every exit rate, the embedded chain
/// P = I + Q/L is stepped once and the goal mass after k steps is weighted by
/// Poisson(L t) probabilities. Truncation and the steady-state cutoff together
/// keep every returned value within `epsilon` of the exact probability.
inline CurveResult transient_probability(const Ctmc& ctmc, std::span<const double> times, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw DomainError("epsilon must lie in (0, 1e-3]");
  check_time_grid(times);

  double unif = 0.0;
  for (StateIndex s = 0; s < ctmc.size(); ++s) unif = std::max(unif, ctmc.exit_rate(s));

  CurveResult out;
  out.xs.assign(times.begin(), times.end());
  out.meta["solver"] = "uniformization";
  out.meta["epsilon"] = format_double(epsilon);
  out.meta["uniformization_rate"] = format_double(unif);
  out.meta["states"] = std::to_string(ctmc.size());

  if (unif == 0.0) {
    out.ys.assign(times.size(), ctmc.goal(ctmc.init()) ? 1.0 : 0.0);
    return out;
  }

  std::vector<PoissonWindow> windows;
  std::size_t steps = 0;
  for (double t : times) {
    windows.push_back(poisson_window(unif * t, epsilon / 4.0));
    steps = std::max(steps, windows.back().right());
  }

  // goal_mass[k] = P(goal after k jumps of the uniformized chain).
  const std::size_t n = ctmc.size();
  std::vector<double> v(n, 0.0), next(n, 0.0), stay(n);
  for (StateIndex s = 0; s < n; ++s) stay[s] = 1.0 - ctmc.exit_rate(s) / unif;
  v[ctmc.init()] = 1.0;
  auto goal_mass = [&] {
    double g = 0.0, moving = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      if (ctmc.goal(s)) g += v[s];
      else if (!ctmc.blocked(s)) moving += v[s];
    }
    return std::pair{g, moving};
  };
  std::vector<double> mass;
  mass.reserve(steps + 1);
  auto [g0, moving] = goal_mass();
  mass.push_back(g0);
  while (mass.size() <= steps) {
    if (moving <= epsilon / 4.0) {
      // Goal mass can grow by at most the remaining transient mass.
      mass.resize(steps + 1, mass.back());
      break;
    }
    for (StateIndex s = 0; s < n; ++s) next[s] = v[s] * stay[s];
    for (const auto& t : ctmc.transitions()) next[t.dst] += v[t.src] * (t.rate / unif);
    v.swap(next);
    auto [g, m] = goal_mass();
    mass.push_back(g);
    moving = m;
  }

  double running = 0.0;
  for (const auto& win : windows) {
    double y = 0.0;
    for (std::size_t i = 0; i < win.weights.size(); ++i) y += win.weights[i] * mass[win.left + i];
    // The exact curve is a nondecreasing probability; clamping and the
    // running maximum keep each point within epsilon of it.
    y = std::clamp(y, 0.0, 1.0);
    running = std::max(running, y);
    out.ys.push_back(running);
  }
  return out;
}

inline double transient_probability_at(const Ctmc& ctmc, double t, double epsilon) {
  const double grid[] = {t};
  return transient_probability(ctmc, grid, epsilon).ys.front();
}

}  // namespace actree
