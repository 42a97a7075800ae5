#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "confound/error.hpp"

namespace confound {

enum class Trend { increasing, decreasing };

inline const char* trend_name(Trend t) {
  return t == Trend::increasing ? "increasing" : "decreasing";
}

// A delta-pair of a series F is an index pair i < j whose values differ by at
// least delta while every value strictly between them stays within delta of
// both endpoints:
//   |F[j] - F[i]| >= delta,  and
//   |F[k] - F[i]| < delta and |F[k] - F[j]| < delta  for all i < k < j.
// Its trend is the sign of F[j] - F[i].
struct DeltaPair {
  std::size_t i = 0;
  std::size_t j = 0;
  Trend trend = Trend::increasing;

  friend bool operator==(const DeltaPair&, const DeltaPair&) = default;
};

// Single left-to-right scan. For a fixed i the only candidate j is the first
// index where |F[j] - F[i]| >= delta: any later j' would have that first
// crossing as an interior point violating the within-delta-of-i condition.
// The crossing being first also guarantees |F[k] - F[i]| < delta for interior
// k, so only the within-delta-of-j half remains to check.
inline std::vector<DeltaPair> find_delta_pairs(std::span<const double> f, double delta) {
  if (!(delta > 0)) throw Error("delta must be positive");
  const std::size_t n = f.size();
  for (double v : f)
    if (!std::isfinite(v)) throw Error("find_delta_pairs: non-finite value");

  std::vector<DeltaPair> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t j = i + 1;
    while (j < n && std::abs(f[j] - f[i]) < delta) ++j;
    if (j == n) continue;
    bool interior_ok = true;
    for (std::size_t k = i + 1; k < j && interior_ok; ++k)
      interior_ok = std::abs(f[k] - f[j]) < delta;
    if (interior_ok)
      out.push_back({i, j, f[j] > f[i] ? Trend::increasing : Trend::decreasing});
  }
  return out;
}

// A series is delta-monotone in a direction when every delta-pair has that
// trend; a series with no delta-pairs is vacuously monotone either way.
inline bool is_delta_monotone(std::span<const double> f, double delta, Trend required) {
  for (const auto& p : find_delta_pairs(f, delta))
    if (p.trend != required) return false;
  return true;
}

// Direction-agnostic form: monotone in whichever direction the pairs agree on.
inline bool is_delta_monotone(std::span<const double> f, double delta) {
  const auto pairs = find_delta_pairs(f, delta);
  for (const auto& p : pairs)
    if (p.trend != pairs.front().trend) return false;
  return true;
}

// Default tolerance policy: twice the largest per-point standard error,
// floored so that noiseless series still ignore sub-percent wiggles.
inline double default_delta(std::span<const double> std_errors, double floor_value = 0.01) {
  double worst = 0.0;
  for (double se : std_errors) {
    if (!(se >= 0)) throw Error("default_delta: standard errors must be non-negative");
    worst = std::max(worst, se);
  }
  return std::max(floor_value, 2.0 * worst);
}

}  // namespace confound
