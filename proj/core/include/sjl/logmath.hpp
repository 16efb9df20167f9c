#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace sjl {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace sjl
