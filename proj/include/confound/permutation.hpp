#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "confound/classifier.hpp"
#include "confound/dataset.hpp"
#include "confound/error.hpp"
#include "confound/metrics.hpp"
#include "confound/parallel.hpp"
#include "confound/rng.hpp"

namespace confound {

struct PermutationConfig {
  std::size_t n_perms = 100;
  double heldout_fraction = 0.2;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PermutationResult {
  std::vector<double> aucs;  // held-out AUC against the true labels, per permutation
  double mean_auc = 0.0;
  double std_error = 0.0;  // empirical standard error of the mean
  double null_sd = 0.0;    // sd of the mean under exchangeable scores
  double p_value = 0.0;    // one-sided: mean AUC above chance
  std::size_t n_pos_heldout = 0;
  std::size_t n_neg_heldout = 0;
};

// Baseline detector that shuffles training labels only within confounder
// groups. Such permutations destroy the label-feature link but preserve the
// label-confounder association, so a mean held-out AUC above 0.5 means the
// classifier can reach the labels through the confounder alone. Each
// permutation refits on a fresh stratified split and evaluates against the
// true held-out labels.
template <BinaryClassifier C>
PermutationResult restricted_permutation_test(const Dataset& data, const PermutationConfig& cfg,
                                              const C& clf) {
  if (cfg.n_perms == 0) throw Error("restricted_permutation_test: n_perms must be positive");

  auto aucs = parallel_map(cfg.n_perms, cfg.threads, [&](std::size_t i) -> double {
    const std::uint64_t ps = rng::derive(cfg.seed, 4, i);
    const CellPartition part = partition_cells(data, cfg.heldout_fraction, rng::derive(ps, 1));

    // Copy the training samples and scramble labels within each confounder
    // level; the level is read off the cell, so no string compares here.
    std::vector<LabeledSample> permuted;
    for (Cell c : kAllCells)
      for (const LabeledSample* s : part.train[cell_index(c)]) permuted.push_back(*s);
    std::size_t pos = 0;
    for (int level = 0; level < 2; ++level) {  // 0 = alpha, 1 = beta
      std::vector<int> labels;
      std::vector<std::size_t> where;
      for (std::size_t k = 0; k < permuted.size(); ++k) {
        const bool is_beta = permuted[k].confounder == part.beta;
        if ((level == 1) == is_beta) {
          labels.push_back(permuted[k].label);
          where.push_back(k);
        }
      }
      rng::SplitMix g(rng::derive(ps, 2, static_cast<std::uint64_t>(level)));
      rng::shuffle(labels, g);
      for (std::size_t k = 0; k < where.size(); ++k) permuted[where[k]].label = labels[k];
      pos += where.size();
    }
    if (pos != permuted.size()) throw Error("restricted_permutation_test: group split leak");

    std::vector<const LabeledSample*> train;
    train.reserve(permuted.size());
    for (const auto& s : permuted) train.push_back(&s);
    const auto model = clf.fit(train, rng::derive(ps, 3));

    std::vector<double> pos_scores, neg_scores;
    for (Cell c : kAllCells)
      for (const LabeledSample* s : part.heldout[cell_index(c)])
        (s->label > 0 ? pos_scores : neg_scores).push_back(model.score(*s));
    return auc(pos_scores, neg_scores);
  });

  PermutationResult r;
  r.aucs = std::move(aucs);
  const auto ms = mean_std_error(r.aucs);
  r.mean_auc = ms.mean;
  r.std_error = ms.std_error;

  // Held-out class sizes are fixed by the cell sizes and the fraction, so
  // compute them once from any partition.
  const CellPartition part = partition_cells(data, cfg.heldout_fraction, cfg.seed);
  for (Cell c : kAllCells) {
    const std::size_t h = part.heldout[cell_index(c)].size();
    (cell_label(c) > 0 ? r.n_pos_heldout : r.n_neg_heldout) += h;
  }
  const double null_var = auc_null_variance(r.n_pos_heldout, r.n_neg_heldout);
  r.null_sd = std::sqrt(null_var / static_cast<double>(cfg.n_perms));
  r.p_value = 0.5 * std::erfc((r.mean_auc - 0.5) / (r.null_sd * std::sqrt(2.0)));
  return r;
}

}  // namespace confound
