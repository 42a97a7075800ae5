#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "confound/dataset.hpp"
#include "confound/error.hpp"
#include "confound/rng.hpp"

namespace confound {

// Synthetic feature model: every feature starts as uniform noise, then four
// index sets add structure. The sets for positive/negative labels fire on
// the sample's label, the alpha/beta sets on its confounder level. A set of
// size 2h adds +k to its first h features and -k to the last h (so a set
// perturbs individual features without moving the set's mean); overlapping
// sets simply add.
struct SimConfig {
  std::size_t n_features = 100;
  // Index sets in the order: positive-label, negative-label, alpha, beta.
  std::array<std::vector<std::size_t>, 4> index_sets = {
      std::vector<std::size_t>{0, 1, 2, 3},
      std::vector<std::size_t>{4, 5, 6, 7},
      std::vector<std::size_t>{8, 9, 10, 11},
      std::vector<std::size_t>{12, 13, 14, 15}};
  // Effect magnitudes, matching index_sets order.
  std::array<double, 4> effects = {0.0, 0.0, 0.0, 0.0};
  double noise_lo = -10.0;
  double noise_hi = 10.0;
  std::uint64_t seed = 0;
};

// Scalar form: one label effect on disjoint positive/negative sets and one
// confounder effect on disjoint alpha/beta sets.
inline SimConfig preset_disjoint(double k_y, double k_c, std::uint64_t seed,
                                 std::size_t n_features = 100) {
  SimConfig cfg;
  cfg.n_features = n_features;
  cfg.effects = {k_y, k_y, k_c, k_c};
  cfg.seed = seed;
  return cfg;
}

// Overlap patterns: four letters name the blocks used by the four sets in
// order (positive, negative, alpha, beta); repeating a letter makes those
// sets share one block of four features. "abcd" is fully disjoint, "abbc"
// makes the negative-label and alpha sets coincide, and so on.
inline SimConfig preset_pattern(const std::string& pattern, const std::array<double, 4>& effects,
                                std::uint64_t seed, std::size_t n_features = 100) {
  if (pattern.size() != 4)
    throw Error("index-set pattern must have 4 letters, got '" + pattern + "'");
  SimConfig cfg;
  cfg.n_features = n_features;
  cfg.effects = effects;
  cfg.seed = seed;

  std::vector<char> symbols;
  for (std::size_t s = 0; s < 4; ++s) {
    const char sym = pattern[s];
    std::size_t block = symbols.size();
    for (std::size_t k = 0; k < symbols.size(); ++k)
      if (symbols[k] == sym) block = k;
    if (block == symbols.size()) symbols.push_back(sym);
    cfg.index_sets[s] = {4 * block, 4 * block + 1, 4 * block + 2, 4 * block + 3};
  }
  if (4 * symbols.size() > n_features)
    throw Error("pattern '" + pattern + "' needs " + std::to_string(4 * symbols.size()) +
                " features, config has " + std::to_string(n_features));
  return cfg;
}

namespace detail {

inline void add_set_effect(std::vector<double>& x, const std::vector<std::size_t>& idx,
                           double k) {
  if (k == 0.0) return;
  const std::size_t h = (idx.size() + 1) / 2;
  for (std::size_t j = 0; j < idx.size(); ++j) x[idx[j]] += (j < h) ? k : -k;
}

}  // namespace detail

// Generates cell_counts[c] samples for each (label, confounder) cell, in the
// cell order (+1,a), (+1,b), (-1,a), (-1,b). Noise is a pure function of
// (seed, cell, within-cell index, feature), so a sample's features do not
// depend on the other cells' sizes.
inline Dataset generate(const SimConfig& cfg, const std::array<std::size_t, 4>& cell_counts) {
  if (cfg.n_features == 0) throw Error("generate: need at least one feature");
  if (!(cfg.noise_lo < cfg.noise_hi)) throw Error("generate: empty noise range");
  for (const auto& set : cfg.index_sets)
    for (std::size_t f : set)
      if (f >= cfg.n_features)
        throw Error("index set touches feature " + std::to_string(f) + " but config has " +
                    std::to_string(cfg.n_features));
  for (double k : cfg.effects)
    if (!std::isfinite(k)) throw Error("generate: non-finite effect size");

  Dataset ds;
  ds.feature_names.reserve(cfg.n_features);
  for (std::size_t f = 0; f < cfg.n_features; ++f)
    ds.feature_names.push_back("x" + std::to_string(f));

  std::int64_t id = 0;
  for (Cell c : kAllCells) {
    const int y = cell_label(c);
    const bool beta = cell_is_beta(c);
    for (std::size_t i = 0; i < cell_counts[cell_index(c)]; ++i) {
      LabeledSample s;
      s.id = id++;
      s.label = y;
      s.confounder = beta ? "b" : "a";
      s.features.resize(cfg.n_features);
      for (std::size_t f = 0; f < cfg.n_features; ++f)
        s.features[f] = rng::uniform_at(cfg.seed, static_cast<std::uint64_t>(cell_index(c)), i,
                                        f, cfg.noise_lo, cfg.noise_hi);
      detail::add_set_effect(s.features, cfg.index_sets[y > 0 ? 0 : 1],
                             cfg.effects[y > 0 ? 0 : 1]);
      detail::add_set_effect(s.features, cfg.index_sets[beta ? 3 : 2],
                             cfg.effects[beta ? 3 : 2]);
      ds.samples.push_back(std::move(s));
    }
  }
  if (ds.samples.empty()) throw Error("generate: all cells empty");
  return ds;
}

inline Dataset generate_balanced(const SimConfig& cfg, std::size_t per_cell) {
  return generate(cfg, {per_cell, per_cell, per_cell, per_cell});
}

// Cell counts with per_class samples in each class and an association
// strength p = share of positives on alpha = share of negatives on beta.
// p = 0.5 is unassociated; p -> 1 confounds labels with levels.
inline std::array<std::size_t, 4> confounded_counts(std::size_t per_class, double p) {
  if (per_class == 0) throw Error("confounded_counts: per_class must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("association p must lie in [0,1]");
  const auto agree =
      static_cast<std::size_t>(std::floor(static_cast<double>(per_class) * p + 0.5));
  return {agree, per_class - agree, per_class - agree, agree};
}

}  // namespace confound
