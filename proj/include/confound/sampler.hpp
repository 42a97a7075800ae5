#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "confound/dataset.hpp"
#include "confound/error.hpp"
#include "confound/rng.hpp"

namespace confound {

// Which confounder level is over-represented among positives in the biased
// training sets: `phi` inflates (+,beta) and (-,alpha); `phi_star` is the
// mirror image with alpha and beta swapped throughout.
enum class Orientation { phi, phi_star };

inline const char* orientation_name(Orientation o) {
  return o == Orientation::phi ? "phi" : "phi_star";
}

// The four sampling roles a cell can play in a biased draw, independent of
// orientation: positive/negative label crossed with under-/over-represented.
// Seed derivation is keyed by role rather than by cell so that a draw under
// one orientation mirrors the matching draw under the other exactly.
enum class Role : int { pos_under = 0, pos_over = 1, neg_over = 2, neg_under = 3 };

inline constexpr std::array<Role, 4> kAllRoles = {Role::pos_under, Role::pos_over,
                                                  Role::neg_over, Role::neg_under};

constexpr Cell role_cell(Role r, Orientation o) {
  const bool swap = o == Orientation::phi_star;
  switch (r) {
    case Role::pos_under: return swap ? Cell::pos_beta : Cell::pos_alpha;
    case Role::pos_over: return swap ? Cell::pos_alpha : Cell::pos_beta;
    case Role::neg_over: return swap ? Cell::neg_beta : Cell::neg_alpha;
    default: return swap ? Cell::neg_alpha : Cell::neg_beta;
  }
}

struct DrawCounts {
  std::size_t lo = 0;  // under-represented cells: N(1-b), rounded half up
  std::size_t hi = 0;  // over-represented cells: 2N minus lo
};

// Training-set composition at bias b: under cells shrink to N(1-b), over
// cells grow to N(1+b); the total stays at 4N for every b.
inline DrawCounts biased_cell_sizes(std::size_t n_per_cell, double b) {
  if (n_per_cell == 0) throw Error("biased_cell_sizes: n_per_cell must be positive");
  if (!(b >= 0.0 && b <= 1.0)) throw Error("bias must lie in [0,1]");
  DrawCounts c;
  c.lo = static_cast<std::size_t>(std::floor(static_cast<double>(n_per_cell) * (1.0 - b) + 0.5));
  c.hi = 2 * n_per_cell - c.lo;
  return c;
}

// Evenly spaced bias values b_k = k*s/N held as exact integer numerators, so
// cell sizes and seeds never depend on floating-point representation of b.
struct BiasGrid {
  std::size_t n_per_cell = 0;           // N
  std::size_t step_samples = 0;         // s
  std::vector<std::size_t> numerators;  // 0, s, 2s, ... (<= N)

  std::size_t size() const { return numerators.size(); }
  double value(std::size_t k) const {
    return static_cast<double>(numerators[k]) / static_cast<double>(n_per_cell);
  }
  double b_max() const { return value(numerators.size() - 1); }

  // Divisor normalizing the raw curve integral so a maximally confounded
  // problem scores 1: the attainable area is b_max - s/(2N), not b_max,
  // because the integrand is pinned to zero at b=0.
  double correction_divisor() const {
    return b_max() - static_cast<double>(step_samples) / (2.0 * static_cast<double>(n_per_cell));
  }
};

inline BiasGrid make_bias_grid(std::size_t n_per_cell, std::size_t step_samples) {
  if (n_per_cell == 0) throw Error("make_bias_grid: n_per_cell must be positive");
  if (step_samples == 0 || step_samples > n_per_cell)
    throw Error("bias step of " + std::to_string(step_samples) + " samples invalid for " +
                std::to_string(n_per_cell) + " per cell (need 1 <= step <= n_per_cell)");
  BiasGrid g;
  g.n_per_cell = n_per_cell;
  g.step_samples = step_samples;
  for (std::size_t a = 0; a <= n_per_cell; a += step_samples) g.numerators.push_back(a);
  return g;
}

// One biased training pool plus the held-out pools its fitted model is
// validated on. The pro pair takes positives and negatives from the cells
// over-represented in training, the cons pair from the under-represented
// ones; at b=0 the roles are interchangeable.
struct BiasedDraw {
  std::vector<const LabeledSample*> train;
  std::vector<const LabeledSample*> val_pos_over;
  std::vector<const LabeledSample*> val_neg_over;
  std::vector<const LabeledSample*> val_pos_under;
  std::vector<const LabeledSample*> val_neg_under;
};

// Draws without replacement from each training cell, sized per the bias, and
// subsamples each held-out cell to val_n. Deterministic in (seed, role):
// the same seed under the opposite orientation yields the mirrored draw.
inline BiasedDraw draw_biased(const CellPartition& part, std::size_t n_per_cell, double b,
                              Orientation o, std::size_t val_n, std::uint64_t seed) {
  if (val_n == 0) throw Error("draw_biased: val_n must be positive");
  const DrawCounts counts = biased_cell_sizes(n_per_cell, b);
  BiasedDraw out;

  for (Role r : kAllRoles) {
    const Cell c = role_cell(r, o);
    const std::size_t want =
        (r == Role::pos_under || r == Role::neg_under) ? counts.lo : counts.hi;
    const auto& pool = part.train[cell_index(c)];
    if (want > pool.size())
      throw Error("insufficient training data in cell " + part.cell_name(c) + ": need " +
                  std::to_string(want) + ", have " + std::to_string(pool.size()));
    std::vector<const LabeledSample*> drawn(pool.begin(), pool.end());
    rng::SplitMix g(rng::derive(seed, static_cast<std::uint64_t>(r)));
    rng::shuffle(drawn, g);
    out.train.insert(out.train.end(), drawn.begin(), drawn.begin() + want);
  }

  for (Role r : kAllRoles) {
    const Cell c = role_cell(r, o);
    const auto& pool = part.heldout[cell_index(c)];
    if (val_n > pool.size())
      throw Error("insufficient held-out data in cell " + part.cell_name(c) + ": need " +
                  std::to_string(val_n) + ", have " + std::to_string(pool.size()));
    std::vector<const LabeledSample*> drawn(pool.begin(), pool.end());
    rng::SplitMix g(rng::derive(seed, 4 + static_cast<std::uint64_t>(r)));
    rng::shuffle(drawn, g);
    drawn.resize(val_n);
    switch (r) {
      case Role::pos_over: out.val_pos_over = std::move(drawn); break;
      case Role::neg_over: out.val_neg_over = std::move(drawn); break;
      case Role::pos_under: out.val_pos_under = std::move(drawn); break;
      case Role::neg_under: out.val_neg_under = std::move(drawn); break;
    }
  }
  return out;
}

}  // namespace confound
