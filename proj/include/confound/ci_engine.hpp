#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "confound/classifier.hpp"
#include "confound/dataset.hpp"
#include "confound/error.hpp"
#include "confound/metrics.hpp"
#include "confound/monotonicity.hpp"
#include "confound/parallel.hpp"
#include "confound/rng.hpp"
#include "confound/sampler.hpp"

namespace confound {

struct SweepConfig {
  std::size_t n_per_cell = 0;    // N; 0 = largest the training pools allow
  double step = 0.1;             // bias step as a fraction of 1
  std::size_t step_samples = 0;  // bias step in samples; overrides `step` when set
  std::size_t repeats = 10;      // independent draws per bias value
  double heldout_fraction = 0.2;
  std::size_t balance_n = 0;     // validation samples per cell; 0 = smallest held-out cell
  double delta = 0.0;            // monotonicity tolerance; 0 = derive from curve noise
  double delta_floor = 0.01;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Mean validation AUC of the models trained at one bias value, for the pair
// of over-represented cells (pro) and the pair of under-represented cells
// (cons), with standard errors over the repeats. At b=0 both entries hold
// the same pooled-validation anchor value.
struct BiasPoint {
  double b = 0.0;
  double mean_auc_pro = 0.0;
  double std_error_pro = 0.0;
  double mean_auc_cons = 0.0;
  double std_error_cons = 0.0;
};

struct CurveIntegrals {
  double phi = 0.0;  // corrected area between the pro and cons curves
  double phi_std_error = 0.0;
  double phi_pro = 0.0;  // pro curve's area above the b=0 anchor
  double phi_pro_std_error = 0.0;
  double phi_cons = 0.0;  // cons curve's area below the anchor
  double phi_cons_std_error = 0.0;
};

// Everything measured for one orientation of the bias sweep.
struct CurveResult {
  Orientation orientation = Orientation::phi;
  std::vector<BiasPoint> points;
  double anchor_auc = 0.0;  // balanced-training validation AUC (b=0)
  double anchor_std_error = 0.0;
  CurveIntegrals integrals;
  double delta_pro = 0.0;  // tolerances used for the monotonicity validation,
  double delta_cons = 0.0;  // each from its own curve's noise
  bool pro_monotone = false;
  bool cons_monotone = false;
  std::vector<DeltaPair> pro_pairs;
  std::vector<DeltaPair> cons_pairs;
};

enum class Scenario { both_monotone, only_phi, only_phi_star, undefined };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::both_monotone: return "BOTH_MONOTONE";
    case Scenario::only_phi: return "ONLY_PHI";
    case Scenario::only_phi_star: return "ONLY_PHI_STAR";
    default: return "UNDEFINED";
  }
}

struct CiResult {
  CurveResult phi;       // orientation phi
  CurveResult phi_star;  // mirrored orientation
  Scenario scenario = Scenario::undefined;
  bool defined = false;
  double ci = 0.0;          // max over the valid orientations, clamped to [0,1]
  std::string diagnostic;   // set when scenario == undefined

  BiasGrid grid;
  std::size_t balance_n = 0;
  std::array<std::size_t, 4> train_counts{};
  std::array<std::size_t, 4> heldout_counts{};
  std::string alpha, beta;
};

// Seed for the biased draw at (bias numerator a, repeat m); the fit seed and
// the per-role subsampling streams are derived from it.
using JobSeedFn = std::function<std::uint64_t(std::size_t a, std::size_t m)>;

struct CurveOptions {
  std::size_t repeats = 10;
  std::size_t balance_n = 1;
  double delta = 0.0;  // 0 = policy: max(delta_floor, 2 * worst std error)
  double delta_floor = 0.01;
  unsigned threads = 1;
};

// Composite-trapezoid weights for the grid's abscissae.
inline std::vector<double> trapezoid_weights(const BiasGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n);
  w[0] = 0.5 * (grid.value(1) - grid.value(0));
  for (std::size_t k = 1; k + 1 < n; ++k) w[k] = 0.5 * (grid.value(k + 1) - grid.value(k - 1));
  w[n - 1] = 0.5 * (grid.value(n - 1) - grid.value(n - 2));
  return w;
}

// Integrates the pro/cons deviation curves and propagates the per-point
// standard errors. The b=0 point is an anchor shared by both curves, so it
// carries no variance of its own in the pro-minus-cons integral; in the
// single-curve integrals it enters every term and its variance is scaled by
// the summed weight of the b>0 points.
inline CurveIntegrals integrate_deviation(const BiasGrid& grid,
                                          std::span<const BiasPoint> pts) {
  if (pts.size() != grid.size())
    throw Error("integrate_deviation: " + std::to_string(pts.size()) + " points for a grid of " +
                std::to_string(grid.size()));
  if (pts[0].mean_auc_pro != pts[0].mean_auc_cons)
    throw Error("integrate_deviation: the b=0 point must hold one shared anchor value");

  const auto w = trapezoid_weights(grid);
  const double anchor = pts[0].mean_auc_pro;
  const double anchor_se = pts[0].std_error_pro;
  const double divisor = grid.correction_divisor();

  double raw = 0.0, raw_pro = 0.0, raw_cons = 0.0;
  double var = 0.0, var_pro = 0.0, var_cons = 0.0;
  double w_tail = 0.0;  // total weight of the b>0 points
  for (std::size_t k = 0; k < pts.size(); ++k) {
    raw += w[k] * (pts[k].mean_auc_pro - pts[k].mean_auc_cons);
    raw_pro += w[k] * (pts[k].mean_auc_pro - anchor);
    raw_cons += w[k] * (anchor - pts[k].mean_auc_cons);
    if (k == 0) continue;
    w_tail += w[k];
    var += w[k] * w[k] *
           (pts[k].std_error_pro * pts[k].std_error_pro +
            pts[k].std_error_cons * pts[k].std_error_cons);
    var_pro += w[k] * w[k] * pts[k].std_error_pro * pts[k].std_error_pro;
    var_cons += w[k] * w[k] * pts[k].std_error_cons * pts[k].std_error_cons;
  }
  var_pro += w_tail * w_tail * anchor_se * anchor_se;
  var_cons += w_tail * w_tail * anchor_se * anchor_se;

  CurveIntegrals out;
  out.phi = std::clamp(raw / divisor, -1.0, 1.0);
  out.phi_pro = raw_pro / divisor;
  out.phi_cons = raw_cons / divisor;
  out.phi_std_error = std::sqrt(var) / divisor;
  out.phi_pro_std_error = std::sqrt(var_pro) / divisor;
  out.phi_cons_std_error = std::sqrt(var_cons) / divisor;
  return out;
}

// Sweeps one orientation: at every grid bias, draws `repeats` training sets,
// fits the classifier and validates on the over- and under-represented
// held-out pairs; then integrates the deviation curves and checks that the
// pro curve delta-monotonically rises and the cons curve falls.
template <BinaryClassifier C>
CurveResult compute_curve(const CellPartition& part, const BiasGrid& grid, Orientation o,
                          const C& clf, const CurveOptions& opt, const JobSeedFn& job_seed) {
  if (opt.repeats == 0) throw Error("compute_curve: repeats must be positive");
  const std::size_t K = grid.size(), M = opt.repeats;

  struct JobOut {
    double auc_pro = 0.0, auc_cons = 0.0;
  };
  const auto outs = parallel_map(K * M, opt.threads, [&](std::size_t idx) -> JobOut {
    const std::size_t k = idx / M, m = idx % M;
    const std::size_t a = grid.numerators[k];
    const std::uint64_t js = job_seed(a, m);
    const BiasedDraw draw =
        draw_biased(part, grid.n_per_cell, grid.value(k), o, opt.balance_n, js);
    const auto model = clf.fit(draw.train, rng::derive(js, 8));
    auto pos_over = model.scores(draw.val_pos_over);
    auto neg_over = model.scores(draw.val_neg_over);
    auto pos_under = model.scores(draw.val_pos_under);
    auto neg_under = model.scores(draw.val_neg_under);
    if (a == 0) {
      pos_over.insert(pos_over.end(), pos_under.begin(), pos_under.end());
      neg_over.insert(neg_over.end(), neg_under.begin(), neg_under.end());
      const double pooled = auc(pos_over, neg_over);
      return {pooled, pooled};
    }
    return {auc(pos_over, neg_over), auc(pos_under, neg_under)};
  });

  CurveResult r;
  r.orientation = o;
  r.points.resize(K);
  std::vector<double> pro(M), cons(M);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) {
      pro[m] = outs[k * M + m].auc_pro;
      cons[m] = outs[k * M + m].auc_cons;
    }
    const auto mp = mean_std_error(pro);
    const auto mc = mean_std_error(cons);
    r.points[k] = {grid.value(k), mp.mean, mp.std_error, mc.mean, mc.std_error};
  }
  r.anchor_auc = r.points[0].mean_auc_pro;
  r.anchor_std_error = r.points[0].std_error_pro;
  r.integrals = integrate_deviation(grid, r.points);

  std::vector<double> pro_series(K), cons_series(K), pro_ses(K), cons_ses(K);
  for (std::size_t k = 0; k < K; ++k) {
    pro_series[k] = r.points[k].mean_auc_pro;
    cons_series[k] = r.points[k].mean_auc_cons;
    pro_ses[k] = r.points[k].std_error_pro;
    cons_ses[k] = r.points[k].std_error_cons;
  }
  r.delta_pro = opt.delta > 0 ? opt.delta : default_delta(pro_ses, opt.delta_floor);
  r.delta_cons = opt.delta > 0 ? opt.delta : default_delta(cons_ses, opt.delta_floor);
  r.pro_pairs = find_delta_pairs(pro_series, r.delta_pro);
  r.cons_pairs = find_delta_pairs(cons_series, r.delta_cons);
  r.pro_monotone = is_delta_monotone(pro_series, r.delta_pro, Trend::increasing);
  r.cons_monotone = is_delta_monotone(cons_series, r.delta_cons, Trend::decreasing);
  return r;
}

namespace detail {

inline std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace detail

// Resolves data-dependent sweep parameters against a concrete partition.
struct ResolvedSweep {
  CellPartition part;
  BiasGrid grid;
  std::size_t balance_n = 0;
};

inline ResolvedSweep resolve_sweep(const Dataset& data, const SweepConfig& cfg) {
  ResolvedSweep rs;
  rs.part = partition_cells(data, cfg.heldout_fraction, rng::derive(cfg.seed, 1));

  std::size_t min_train = SIZE_MAX, min_held = SIZE_MAX;
  for (Cell c : kAllCells) {
    min_train = std::min(min_train, rs.part.train[cell_index(c)].size());
    min_held = std::min(min_held, rs.part.heldout[cell_index(c)].size());
  }

  std::size_t N = cfg.n_per_cell;
  if (N == 0) {
    N = min_train / 2;  // fully biased draws need 2N from the over cells
    if (N == 0)
      throw Error("training pools too small to sweep: smallest cell has " +
                  std::to_string(min_train) + " training samples");
  }

  std::size_t s = cfg.step_samples;
  if (s == 0) {
    if (!(cfg.step > 0 && cfg.step <= 1)) throw Error("bias step must lie in (0,1]");
    s = std::max<std::size_t>(1, detail::round_half_up(cfg.step * static_cast<double>(N)));
  }
  rs.grid = make_bias_grid(N, s);

  const std::size_t need = N + rs.grid.numerators.back();
  if (need > min_train)
    throw Error("n_per_cell of " + std::to_string(N) + " needs up to " + std::to_string(need) +
                " training samples per cell at full bias, but the smallest cell has " +
                std::to_string(min_train));

  rs.balance_n = cfg.balance_n == 0 ? min_held : cfg.balance_n;
  if (rs.balance_n > min_held)
    throw Error("balance_n of " + std::to_string(rs.balance_n) +
                " exceeds the smallest held-out cell (" + std::to_string(min_held) + ")");
  return rs;
}

// Runs both orientations and applies the decision rule: an orientation is
// trusted when its pro curve rises and its cons curve falls delta-
// monotonically; the index is the largest trusted area, clamped to [0,1].
// With neither orientation trusted the index is undefined.
template <BinaryClassifier C>
CiResult compute_ci(const Dataset& data, const SweepConfig& cfg, const C& clf) {
  const ResolvedSweep rs = resolve_sweep(data, cfg);

  CurveOptions opt;
  opt.repeats = cfg.repeats;
  opt.balance_n = rs.balance_n;
  opt.delta = cfg.delta;
  opt.delta_floor = cfg.delta_floor;
  opt.threads = cfg.threads;

  const std::uint64_t root = cfg.seed;
  const JobSeedFn seed_phi = [root](std::size_t a, std::size_t m) {
    return rng::derive(root, 2, a, m);
  };
  const JobSeedFn seed_star = [root](std::size_t a, std::size_t m) {
    return rng::derive(root, 3, a, m);
  };

  CiResult r;
  r.grid = rs.grid;
  r.balance_n = rs.balance_n;
  r.train_counts = {rs.part.train[0].size(), rs.part.train[1].size(),
                    rs.part.train[2].size(), rs.part.train[3].size()};
  r.heldout_counts = {rs.part.heldout[0].size(), rs.part.heldout[1].size(),
                      rs.part.heldout[2].size(), rs.part.heldout[3].size()};
  r.alpha = rs.part.alpha;
  r.beta = rs.part.beta;

  r.phi = compute_curve(rs.part, rs.grid, Orientation::phi, clf, opt, seed_phi);
  r.phi_star = compute_curve(rs.part, rs.grid, Orientation::phi_star, clf, opt, seed_star);

  const bool phi_ok = r.phi.pro_monotone && r.phi.cons_monotone;
  const bool star_ok = r.phi_star.pro_monotone && r.phi_star.cons_monotone;
  const double v_phi = r.phi.integrals.phi;
  const double v_star = r.phi_star.integrals.phi;

  if (phi_ok && star_ok) {
    r.scenario = Scenario::both_monotone;
    r.ci = std::max(v_phi, v_star);
  } else if (phi_ok) {
    r.scenario = Scenario::only_phi;
    r.ci = v_phi;
  } else if (star_ok) {
    r.scenario = Scenario::only_phi_star;
    r.ci = v_star;
  } else {
    r.scenario = Scenario::undefined;
    r.diagnostic =
        "neither orientation produced delta-monotone validation curves, so the AUC "
        "deviations do not follow the biased-sampling model and no index is reported. "
        "Common causes: covariates other than the tested variable differing across the "
        "four cells, or curve noise swamping the trend (raise repeats, enlarge the "
        "validation pools, or coarsen the bias step).";
  }
  r.defined = r.scenario != Scenario::undefined;
  if (r.defined) r.ci = std::clamp(r.ci, 0.0, 1.0);
  return r;
}

}  // namespace confound
