#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

// Deterministic, platform-independent randomness. All stochastic choices in
// the library flow through these helpers so that a run is reproducible from a
// single root seed, independent of standard-library implementation details
// and of job scheduling order.

namespace confound::rng {

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Order-sensitive fold of an arbitrary key tuple into one 64-bit seed.
constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (mix64(v) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

template <typename... Rest>
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t v, Rest... rest) {
  std::uint64_t h = combine(seed, v);
  if constexpr (sizeof...(rest) == 0) {
    return h;
  } else {
    return derive(h, rest...);
  }
}

// FNV-1a, for folding strings (e.g. confounder level names) into seed keys.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// SplitMix64 stream; small state, good enough statistics for subsampling and
// label shuffles.
class SplitMix {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

 private:
  std::uint64_t state_;
};

// Fisher-Yates; identical output on every platform for a given seed.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(g.bounded(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Counter-based uniform draw: a pure function of its key, so values do not
// depend on generation order.
inline double uniform_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c, double lo, double hi) {
  const std::uint64_t h = derive(seed, a, b, c);
  return lo + static_cast<double>(h >> 11) * 0x1.0p-53 * (hi - lo);
}

}  // namespace confound::rng
