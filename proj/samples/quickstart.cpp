// Builds a small guarded attack in memory and prints its static and timed
// success probabilities.

#include <cstdio>

#include "actree/actree.hpp"

int main() {
  using namespace actree;

  const Act act = parse_act(R"(
    act "Quickstart" {
      root goal;
      goal = OR(guarded, phishing);
      guarded = AND(exploit, patching);
      exploit = ATTACK(p=0.4, t=2);
      patching = CM(scan, patch);
      scan = DETECT(p=0.7, t=1);
      patch = MITIGATE(p=0.9, t=1);
      phishing = ATTACK(p=0.05, t=1);
    }
  )");

  for (Scenario s : kAllScenarios) {
    std::printf("%-12s static Pgoal = %.6f\n", std::string(to_string(s)).c_str(), static_probability(act, s));
  }

  const double hours[] = {0.5, 1, 2, 5, 10};
  const Ctmc chain = compose(act, Scenario::Full);
  const CurveResult curve = transient_probability(chain, hours, 1e-9);
  for (std::size_t i = 0; i < curve.xs.size(); ++i) {
    std::printf("t = %5.1f h  Pgoal = %.6f\n", curve.xs[i], curve.ys[i]);
  }

  for (const CmEffect& e : rank_countermeasures(act, 2.0, 1e-9)) {
    std::printf("%s: delta = %.6f\n", e.name.c_str(), e.delta);
  }
}
