#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confound/error.hpp"

namespace confound {

// Area under the ROC curve via the rank-sum (Mann-Whitney) identity, with
// averaged ranks for tied scores:
//   AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg)
// where R_pos is the rank sum of the positive-class scores in the pooled
// ranking. A tie contributes 1/2, so chance level is exactly 0.5.
inline double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  const std::size_t np = pos_scores.size(), nn = neg_scores.size();
  if (np == 0 || nn == 0) throw Error("auc: both classes need at least one score");

  std::vector<std::pair<double, int>> all;  // (score, 1 if positive)
  all.reserve(np + nn);
  for (double v : pos_scores) {
    if (!std::isfinite(v)) throw Error("auc: non-finite score");
    all.emplace_back(v, 1);
  }
  for (double v : neg_scores) {
    if (!std::isfinite(v)) throw Error("auc: non-finite score");
    all.emplace_back(v, 0);
  }
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t n = all.size();
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t pos_in_tie = 0;
    while (j < n && all[j].first == all[i].first) pos_in_tie += all[j++].second;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    rank_sum += avg_rank * static_cast<double>(pos_in_tie);
    i = j;
  }
  return (rank_sum - 0.5 * static_cast<double>(np) * static_cast<double>(np + 1)) /
         (static_cast<double>(np) * static_cast<double>(nn));
}

// Variance of the AUC estimator under the null of exchangeable scores:
//   (n_pos + n_neg + 1) / (12 * n_pos * n_neg)
inline double auc_null_variance(std::size_t n_pos, std::size_t n_neg) {
  if (n_pos == 0 || n_neg == 0)
    throw Error("auc_null_variance: both classes need at least one sample");
  return static_cast<double>(n_pos + n_neg + 1) /
         (12.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Composite trapezoid rule over an increasing abscissa grid.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("trapezoid: x and y differ in length");
  if (x.size() < 2) throw Error("trapezoid: need at least two points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) throw Error("trapezoid: x must be strictly increasing");
    acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  }
  return acc;
}

struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
};

// Mean and standard error of the mean over independent repeats.
inline MeanStdErr mean_std_error(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean_std_error: empty sample");
  MeanStdErr r;
  for (double v : xs) r.mean += v;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double v : xs) ss += (v - r.mean) * (v - r.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    r.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return r;
}

}  // namespace confound
