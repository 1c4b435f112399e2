#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "actree/error.hpp"

namespace actree {

/// Exponential rate in events per hour. Always finite and non-negative.
class Rate {
 public:
  constexpr Rate() = default;
  explicit Rate(double per_hour) : value_(per_hour) {
    if (!std::isfinite(per_hour) || per_hour < 0.0) {
      throw DomainError("rate must be finite and non-negative, got " + std::to_string(per_hour));
    }
  }

  constexpr double per_hour() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0.0; }

  friend constexpr auto operator<=>(const Rate&, const Rate&) = default;

 private:
  double value_ = 0.0;
};

/// Rate of the exponential whose CDF reaches `p` at time `hours`: -ln(1 - p) / hours.
inline Rate rate_from_probability(double p, double hours) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0,1]: " + std::to_string(p));
  if (!(hours > 0.0) || !std::isfinite(hours)) {
    throw DomainError("time horizon must be positive and finite: " + std::to_string(hours));
  }
  if (p == 1.0) throw RateUndefined("p = 1 has no finite exponential rate");
  // log1p keeps full relative precision for tiny p.
  return Rate(-std::log1p(-p) / hours);
}

/// P[X < t] = 1 - exp(-lambda t).
inline double success_cdf(Rate lambda, double hours) {
  if (!(hours >= 0.0)) throw DomainError("time must be non-negative: " + std::to_string(hours));
  if (std::isinf(hours)) return lambda.is_zero() ? 0.0 : 1.0;
  return -std::expm1(-lambda.per_hour() * hours);
}

}  // namespace actree
