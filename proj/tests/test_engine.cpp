#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "confound/ci_engine.hpp"
#include "confound/simgen.hpp"
#include "testutil.hpp"

using namespace confound;
using Catch::Matchers::WithinAbs;

TEST_CASE("trapezoid weights reproduce the composite rule") {
  const BiasGrid g = make_bias_grid(10, 5);  // b = 0, 0.5, 1
  const auto w = trapezoid_weights(g);
  REQUIRE(w.size() == 3);
  CHECK_THAT(w[0], WithinAbs(0.25, 1e-15));
  CHECK_THAT(w[1], WithinAbs(0.5, 1e-15));
  CHECK_THAT(w[2], WithinAbs(0.25, 1e-15));
}

TEST_CASE("curve integration on a hand-checked case") {
  const BiasGrid g = make_bias_grid(10, 5);  // weights {1/4, 1/2, 1/4}, divisor 3/4
  std::vector<BiasPoint> pts{{0.0, 0.6, 0.01, 0.6, 0.01},
                             {0.5, 0.7, 0.02, 0.5, 0.01},
                             {1.0, 0.9, 0.03, 0.3, 0.02}};
  const CurveIntegrals ci = integrate_deviation(g, pts);
  CHECK_THAT(ci.phi, WithinAbs((0.5 * 0.2 + 0.25 * 0.6) / 0.75, 1e-15));
  CHECK_THAT(ci.phi_pro, WithinAbs((0.5 * 0.1 + 0.25 * 0.3) / 0.75, 1e-15));
  CHECK_THAT(ci.phi_cons, WithinAbs((0.5 * 0.1 + 0.25 * 0.3) / 0.75, 1e-15));
  const double var = 0.25 * (0.02 * 0.02 + 0.01 * 0.01) + 0.0625 * (0.03 * 0.03 + 0.02 * 0.02);
  CHECK_THAT(ci.phi_std_error, WithinAbs(std::sqrt(var) / 0.75, 1e-15));
  const double var_pro =
      0.25 * 0.02 * 0.02 + 0.0625 * 0.03 * 0.03 + 0.75 * 0.75 * 0.01 * 0.01;
  CHECK_THAT(ci.phi_pro_std_error, WithinAbs(std::sqrt(var_pro) / 0.75, 1e-15));
}

TEST_CASE("the area splits exactly into pro and cons parts") {
  rng::SplitMix rnd(77);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t N = 10 + rnd.bounded(200);
    const std::size_t s = 1 + rnd.bounded(N);
    const BiasGrid g = make_bias_grid(N, s);
    std::vector<BiasPoint> pts(g.size());
    const double anchor = rnd.uniform(0.3, 0.7);
    pts[0] = {g.value(0), anchor, rnd.uniform(0, 0.05), anchor, 0.0};
    pts[0].std_error_cons = pts[0].std_error_pro;
    for (std::size_t k = 1; k < pts.size(); ++k)
      pts[k] = {g.value(k), rnd.uniform(0, 1), rnd.uniform(0, 0.05), rnd.uniform(0, 1),
                rnd.uniform(0, 0.05)};
    const CurveIntegrals ci = integrate_deviation(g, pts);
    CHECK_THAT(ci.phi_pro + ci.phi_cons, WithinAbs(ci.phi, 1e-12));
  }
}

TEST_CASE("a maximal deviation curve integrates to one") {
  // pro pinned at 1, cons at 0 for every b > 0: the raw area equals the
  // correction divisor exactly, so the corrected value is 1.
  for (auto [N, s] : {std::pair<std::size_t, std::size_t>{100, 20}, {100, 40}, {30, 7}}) {
    const BiasGrid g = make_bias_grid(N, s);
    std::vector<BiasPoint> pts(g.size());
    pts[0] = {0.0, 0.5, 0.0, 0.5, 0.0};
    for (std::size_t k = 1; k < pts.size(); ++k) pts[k] = {g.value(k), 1.0, 0.0, 0.0, 0.0};
    CHECK_THAT(integrate_deviation(g, pts).phi, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("integration rejects malformed input") {
  const BiasGrid g = make_bias_grid(10, 5);
  std::vector<BiasPoint> two{{0.0, 0.5, 0.0, 0.5, 0.0}, {0.5, 0.6, 0.0, 0.4, 0.0}};
  CHECK_THROWS_AS(integrate_deviation(g, two), Error);
  std::vector<BiasPoint> split_anchor{{0.0, 0.5, 0.0, 0.6, 0.0},
                                      {0.5, 0.6, 0.0, 0.4, 0.0},
                                      {1.0, 0.7, 0.0, 0.3, 0.0}};
  CHECK_THROWS_AS(integrate_deviation(g, split_anchor), Error);
}

namespace {

SweepConfig small_sweep(std::uint64_t seed) {
  SweepConfig cfg;
  cfg.n_per_cell = 16;
  cfg.step_samples = 8;  // b = 0, 0.5, 1
  cfg.repeats = 4;
  cfg.heldout_fraction = 0.25;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("sweeps are reproducible") {
  const Dataset ds = generate_balanced(preset_disjoint(2.0, 4.0, 5, 20), 48);
  const LogisticRegression clf;
  const CiResult a = compute_ci(ds, small_sweep(11), clf);
  const CiResult b = compute_ci(ds, small_sweep(11), clf);
  REQUIRE(a.phi.points.size() == b.phi.points.size());
  for (std::size_t k = 0; k < a.phi.points.size(); ++k) {
    CHECK(a.phi.points[k].mean_auc_pro == b.phi.points[k].mean_auc_pro);
    CHECK(a.phi_star.points[k].std_error_cons == b.phi_star.points[k].std_error_cons);
  }
  CHECK(a.ci == b.ci);
  CHECK(a.scenario == b.scenario);
}

TEST_CASE("the two orientations are exact mirrors under shared seeds") {
  const Dataset ds = generate_balanced(preset_disjoint(1.0, 3.0, 21, 20), 40);
  Dataset mirrored = ds;
  mirrored.confounder_levels = std::make_pair("b", "a");

  const auto part = partition_cells(ds, 0.25, 4);
  const auto part_m = partition_cells(mirrored, 0.25, 4);
  const BiasGrid grid = make_bias_grid(12, 6);
  CurveOptions opt;
  opt.repeats = 3;
  opt.balance_n = 8;
  const JobSeedFn seeds = [](std::size_t a, std::size_t m) { return rng::derive(50, a, m); };

  const LogisticRegression clf;
  const CurveResult star = compute_curve(part, grid, Orientation::phi_star, clf, opt, seeds);
  const CurveResult mirror_phi = compute_curve(part_m, grid, Orientation::phi, clf, opt, seeds);

  REQUIRE(star.points.size() == mirror_phi.points.size());
  for (std::size_t k = 0; k < star.points.size(); ++k) {
    CHECK(star.points[k].mean_auc_pro == mirror_phi.points[k].mean_auc_pro);
    CHECK(star.points[k].mean_auc_cons == mirror_phi.points[k].mean_auc_cons);
    CHECK(star.points[k].std_error_pro == mirror_phi.points[k].std_error_pro);
  }
  CHECK(star.integrals.phi == mirror_phi.integrals.phi);
  CHECK(star.integrals.phi_pro == mirror_phi.integrals.phi_pro);
}

TEST_CASE("a strongly confounded problem yields a clearly positive index") {
  const Dataset ds = generate_balanced(preset_disjoint(0.0, 8.0, 31, 20), 60);
  SweepConfig cfg = small_sweep(13);
  cfg.n_per_cell = 20;
  cfg.step_samples = 10;
  cfg.repeats = 5;
  const CiResult r = compute_ci(ds, cfg, LogisticRegression());
  REQUIRE(r.defined);
  CHECK(r.ci > 0.3);
  CHECK(r.ci <= 1.0);
  // symmetric construction: both orientations should see it
  CHECK(r.scenario == Scenario::both_monotone);
  CHECK(r.phi.pro_monotone);
  CHECK(r.phi.cons_monotone);
  // pro curves rise from the anchor, cons curves fall
  const auto& pts = r.phi.points;
  CHECK(pts.back().mean_auc_pro > pts.front().mean_auc_pro + 0.1);
  CHECK(pts.back().mean_auc_cons < pts.front().mean_auc_cons - 0.1);
}

TEST_CASE("an unconfoundable problem stays near zero") {
  const Dataset ds = generate_balanced(preset_disjoint(5.0, 0.0, 41, 20), 60);
  SweepConfig cfg = small_sweep(17);
  cfg.n_per_cell = 20;
  cfg.step_samples = 10;
  cfg.repeats = 5;
  const CiResult r = compute_ci(ds, cfg, LogisticRegression());
  if (r.defined) CHECK(std::abs(r.ci) < 0.15);
  CHECK(std::abs(r.phi.integrals.phi) < 0.15);
  CHECK(std::abs(r.phi_star.integrals.phi) < 0.15);
}

TEST_CASE("sweep resolution fills in data-driven defaults") {
  const Dataset ds = generate_balanced(preset_disjoint(1.0, 1.0, 3, 20), 50);
  SweepConfig cfg;
  cfg.heldout_fraction = 0.2;  // 40 train, 10 held out per cell
  cfg.step = 0.5;
  cfg.seed = 5;
  const ResolvedSweep rs = resolve_sweep(ds, cfg);
  CHECK(rs.grid.n_per_cell == 20);  // half the smallest training pool
  CHECK(rs.grid.step_samples == 10);
  CHECK(rs.balance_n == 10);  // whole held-out cell

  SweepConfig too_big = cfg;
  too_big.n_per_cell = 30;
  CHECK_THROWS_WITH(resolve_sweep(ds, too_big),
                    Catch::Matchers::ContainsSubstring("full bias"));
  SweepConfig bad_balance = cfg;
  bad_balance.balance_n = 11;
  CHECK_THROWS_AS(resolve_sweep(ds, bad_balance), Error);
}

TEST_CASE("thread count does not change results") {
  const Dataset ds = generate_balanced(preset_disjoint(1.5, 3.0, 61, 20), 48);
  SweepConfig cfg = small_sweep(23);
  cfg.threads = 1;
  const CiResult serial = compute_ci(ds, cfg, LogisticRegression());
  cfg.threads = 4;
  const CiResult parallel = compute_ci(ds, cfg, LogisticRegression());
  for (std::size_t k = 0; k < serial.phi.points.size(); ++k) {
    CHECK(serial.phi.points[k].mean_auc_pro == parallel.phi.points[k].mean_auc_pro);
    CHECK(serial.phi_star.points[k].mean_auc_cons ==
          parallel.phi_star.points[k].mean_auc_cons);
  }
  CHECK(serial.ci == parallel.ci);
}
