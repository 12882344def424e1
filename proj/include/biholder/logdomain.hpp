#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace biholder {

// Magnitudes across the scale hierarchy collapse to zero (or overflow) long
// before the stage index gets interesting, so every scale is carried as its
// base-2 logarithm and only materialized when safely representable.
inline constexpr double kLinearizableLog2 = 900.0;

inline bool linear_representable(double log2Value) {
  return std::abs(log2Value) <= kLinearizableLog2;
}

// Linear value for a log2 magnitude, or nullopt when out of safe range.
inline std::optional<double> linear_of_log2(double log2Value) {
  if (!linear_representable(log2Value)) return std::nullopt;
  return std::exp2(log2Value);
}

// log2(a + b) for a, b given as log2 magnitudes.
inline double log2_add(double log2A, double log2B) {
  if (log2A < log2B) std::swap(log2A, log2B);
  if (log2A == -std::numeric_limits<double>::infinity()) return log2A;
  return log2A + std::log2(1.0 + std::exp2(log2B - log2A));
}

inline double log2_sum(const std::vector<double>& log2Terms) {
  double acc = -std::numeric_limits<double>::infinity();
  for (double t : log2Terms) acc = log2_add(acc, t);
  return acc;
}

}  // namespace biholder
