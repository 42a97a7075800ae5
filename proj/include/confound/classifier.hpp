#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "confound/dataset.hpp"
#include "confound/error.hpp"

namespace confound {

// Any learner usable by the bias-sweep machinery: fitting a pool of samples
// yields a model that scores a sample with a real number, higher meaning
// more positive. Only the ranking of scores matters (AUC is rank-based).
template <typename C>
concept BinaryClassifier =
    requires(const C& c, std::span<const LabeledSample* const> train, std::uint64_t seed,
             const LabeledSample& s) {
      { c.fit(train, seed).score(s) } -> std::convertible_to<double>;
    };

struct LogisticRegressionConfig {
  double l2 = 1e-3;          // ridge penalty on weights; intercept unpenalized
  double learn_rate = 0.1;   // initial gradient step
  int max_iters = 500;
  double grad_tol = 1e-6;    // stop when the gradient sup-norm drops below
  bool standardize = true;   // per-feature z-scoring on the training pool
};

// L2-regularized logistic regression trained by full-batch gradient descent
// with a doubling/halving adaptive step. Deterministic: weights start at
// zero, so the seed is unused (kept for learners with stochastic fitting).
class LogisticRegression {
 public:
  LogisticRegression() = default;
  explicit LogisticRegression(const LogisticRegressionConfig& cfg) : cfg_(cfg) {}

  class Model {
   public:
    double score(const LabeledSample& s) const {
      if (s.features.size() != w_.size())
        throw Error("score: sample has " + std::to_string(s.features.size()) +
                    " features, model expects " + std::to_string(w_.size()));
      double z = b_;
      for (std::size_t k = 0; k < w_.size(); ++k)
        z += w_[k] * (s.features[k] - mean_[k]) / std_[k];
      return z;
    }

    std::vector<double> scores(std::span<const LabeledSample* const> pool) const {
      std::vector<double> out;
      out.reserve(pool.size());
      for (const LabeledSample* s : pool) out.push_back(score(*s));
      return out;
    }

    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }
    int iterations() const { return iters_; }

   private:
    friend class LogisticRegression;
    std::vector<double> w_, mean_, std_;
    double b_ = 0.0;
    int iters_ = 0;
  };

  Model fit(std::span<const LabeledSample* const> train, std::uint64_t /*seed*/) const {
    const std::size_t n = train.size();
    if (n == 0) throw Error("fit: empty training pool");
    const std::size_t d = train[0]->features.size();
    if (d == 0) throw Error("fit: samples have no features");
    for (const LabeledSample* s : train)
      if (s->features.size() != d) throw Error("fit: inconsistent feature counts");

    Model m;
    m.mean_.assign(d, 0.0);
    m.std_.assign(d, 1.0);
    if (cfg_.standardize) {
      for (const LabeledSample* s : train)
        for (std::size_t k = 0; k < d; ++k) m.mean_[k] += s->features[k];
      for (double& v : m.mean_) v /= static_cast<double>(n);
      std::vector<double> ss(d, 0.0);
      for (const LabeledSample* s : train)
        for (std::size_t k = 0; k < d; ++k) {
          const double c = s->features[k] - m.mean_[k];
          ss[k] += c * c;
        }
      for (std::size_t k = 0; k < d; ++k) {
        const double sd = std::sqrt(ss[k] / static_cast<double>(n));
        m.std_[k] = sd > 0 ? sd : 1.0;  // constant feature: leave centered, unscaled
      }
    }

    // Cache standardized features once; GD touches them every iteration.
    std::vector<double> x(n * d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = train[i]->label > 0 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < d; ++k)
        x[i * d + k] = (train[i]->features[k] - m.mean_[k]) / m.std_[k];
    }

    std::vector<double> w(d, 0.0), gw(d);
    double b = 0.0, gb = 0.0;
    double loss = loss_and_grad(x, y, w, b, gw, gb);
    double step = cfg_.learn_rate;

    std::vector<double> w_try(d), gw_try(d);
    int it = 0;
    for (; it < cfg_.max_iters; ++it) {
      double gmax = std::abs(gb);
      for (double g : gw) gmax = std::max(gmax, std::abs(g));
      if (gmax < cfg_.grad_tol) break;

      // Halve the step until the full-batch loss stops increasing, then let
      // it grow again; the penalized loss is convex so this always succeeds.
      for (;;) {
        for (std::size_t k = 0; k < d; ++k) w_try[k] = w[k] - step * gw[k];
        const double b_try = b - step * gb;
        double gb_try;
        const double loss_try = loss_and_grad(x, y, w_try, b_try, gw_try, gb_try);
        if (loss_try <= loss || step < 1e-14) {
          w.swap(w_try);
          b = b_try;
          gw.swap(gw_try);
          gb = gb_try;
          loss = loss_try;
          step = std::min(step * 2.0, 1e6);
          break;
        }
        step *= 0.5;
      }
    }

    m.w_ = std::move(w);
    m.b_ = b;
    m.iters_ = it;
    return m;
  }

  const LogisticRegressionConfig& config() const { return cfg_; }

 private:
  // loss = mean_i softplus(-y_i z_i) + (l2/2) |w|^2, with z = w.x + b.
  double loss_and_grad(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& w, double b, std::vector<double>& gw,
                       double& gb) const {
    const std::size_t n = y.size(), d = w.size();
    std::fill(gw.begin(), gw.end(), 0.0);
    gb = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      const double* xi = x.data() + i * d;
      for (std::size_t k = 0; k < d; ++k) z += w[k] * xi[k];
      const double u = -y[i] * z;
      loss += std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));  // softplus(u)
      // d softplus(-y z)/dz = -y * sigmoid(-y z)
      const double sig = u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
      const double dz = -y[i] * sig;
      for (std::size_t k = 0; k < d; ++k) gw[k] += dz * xi[k];
      gb += dz;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    gb *= inv_n;
    for (std::size_t k = 0; k < d; ++k) gw[k] = gw[k] * inv_n + cfg_.l2 * w[k];
    double pen = 0.0;
    for (double wk : w) pen += wk * wk;
    loss += 0.5 * cfg_.l2 * pen;
    return loss;
  }

  LogisticRegressionConfig cfg_;
};

static_assert(BinaryClassifier<LogisticRegression>);

}  // namespace confound
