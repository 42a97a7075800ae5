#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "confound/classifier.hpp"
#include "confound/metrics.hpp"
#include "confound/rng.hpp"
#include "testutil.hpp"

using namespace confound;

namespace {

// Two Gaussian-ish blobs along the first feature, second feature pure noise.
std::vector<LabeledSample> blob_data(std::size_t n_per_class, double separation,
                                     std::uint64_t seed) {
  std::vector<LabeledSample> out;
  rng::SplitMix g(seed);
  std::int64_t id = 0;
  for (int label : {+1, -1})
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const double f0 = g.uniform(-1, 1) + (label > 0 ? separation : 0.0);
      out.push_back(testutil::sample(id++, {f0, g.uniform(-1, 1)}, label, "a"));
    }
  return out;
}

std::vector<const LabeledSample*> ptrs(const std::vector<LabeledSample>& v) {
  std::vector<const LabeledSample*> p;
  for (const auto& s : v) p.push_back(&s);
  return p;
}

}  // namespace

TEST_CASE("separable classes are ranked perfectly") {
  const auto data = blob_data(40, 5.0, 1);
  const auto model = LogisticRegression().fit(ptrs(data), 0);
  std::vector<double> pos, neg;
  for (const auto& s : data) (s.label > 0 ? pos : neg).push_back(model.score(s));
  CHECK(auc(pos, neg) == 1.0);
  CHECK(model.weights()[0] > 0.0);
}

TEST_CASE("fitting is deterministic and seed-independent") {
  const auto data = blob_data(30, 1.0, 2);
  const auto a = LogisticRegression().fit(ptrs(data), 0);
  const auto b = LogisticRegression().fit(ptrs(data), 12345);
  CHECK(a.weights() == b.weights());
  CHECK(a.bias() == b.bias());
}

TEST_CASE("stronger regularization shrinks the weights") {
  const auto data = blob_data(30, 2.0, 3);
  LogisticRegressionConfig weak, strong;
  weak.l2 = 1e-4;
  strong.l2 = 10.0;
  const auto mw = LogisticRegression(weak).fit(ptrs(data), 0);
  const auto ms = LogisticRegression(strong).fit(ptrs(data), 0);
  CHECK(std::abs(ms.weights()[0]) < std::abs(mw.weights()[0]));
}

TEST_CASE("standardization makes scoring invariant to feature scaling") {
  const auto data = blob_data(30, 1.5, 4);
  auto scaled = data;
  for (auto& s : scaled) {
    s.features[0] = s.features[0] * 1000.0 - 5.0;
    s.features[1] = s.features[1] * 0.001 + 2.0;
  }
  const auto m = LogisticRegression().fit(ptrs(data), 0);
  const auto ms = LogisticRegression().fit(ptrs(scaled), 0);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK_THAT(m.score(data[i]), Catch::Matchers::WithinAbs(ms.score(scaled[i]), 1e-6));
}

TEST_CASE("constant features are tolerated") {
  auto data = blob_data(20, 2.0, 5);
  for (auto& s : data) s.features[1] = 3.0;
  const auto m = LogisticRegression().fit(ptrs(data), 0);
  CHECK(std::isfinite(m.score(data[0])));
  CHECK(m.weights()[1] == 0.0);  // constant column carries no gradient
}

TEST_CASE("gradient descent approaches the optimum") {
  // with few iterations the loss must be no better than with many
  const auto data = blob_data(25, 1.0, 6);
  LogisticRegressionConfig coarse, fine;
  coarse.max_iters = 3;
  fine.max_iters = 2000;
  fine.grad_tol = 1e-10;
  const auto mc = LogisticRegression(coarse).fit(ptrs(data), 0);
  const auto mf = LogisticRegression(fine).fit(ptrs(data), 0);
  CHECK(mf.iterations() >= mc.iterations());
  // the converged model scores the training classes at least as well
  std::vector<double> pos_f, neg_f, pos_c, neg_c;
  for (const auto& s : data) {
    (s.label > 0 ? pos_f : neg_f).push_back(mf.score(s));
    (s.label > 0 ? pos_c : neg_c).push_back(mc.score(s));
  }
  CHECK(auc(pos_f, neg_f) >= auc(pos_c, neg_c) - 1e-9);
}

TEST_CASE("fit validates its input") {
  const LogisticRegression lr;
  CHECK_THROWS_AS(lr.fit({}, 0), Error);
  std::vector<LabeledSample> bad{testutil::sample(0, {1.0}, 1, "a"),
                                 testutil::sample(1, {1.0, 2.0}, -1, "a")};
  CHECK_THROWS_AS(lr.fit(ptrs(bad), 0), Error);
  const auto good = blob_data(5, 1.0, 7);
  const auto m = LogisticRegression().fit(ptrs(good), 0);
  CHECK_THROWS_AS(m.score(testutil::sample(9, {1.0, 2.0, 3.0}, 1, "a")), Error);
}
