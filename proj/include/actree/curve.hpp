#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "actree/error.hpp"

namespace actree {

/// Sampled curve (x grid to Pgoal) with provenance metadata.
/// `half_width` is filled by the simulator (3-sigma confidence), empty otherwise.
struct CurveResult {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> half_width;
  std::string scenario;
  std::map<std::string, std::string> meta;
};

inline void check_time_grid(std::span<const double> times) {
  if (times.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("time grid values must be finite and >= 0");
    if (i && !(times[i] > times[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
}

}  // namespace actree
