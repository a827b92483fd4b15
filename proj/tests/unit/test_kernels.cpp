#include <omp.h>

#include <cmath>
#include <vector>

#include "claytonboost/booster.hpp"
#include "claytonboost/error.hpp"
#include "claytonboost/kernels.hpp"
#include "claytonboost/random.hpp"
#include "claytonboost/simulate.hpp"
#include "doctest.h"

using namespace claytonboost;

namespace {

struct ThreadScope {
  explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
  int saved;
};

SurvivalDataset Data(std::size_t n, std::uint64_t seed) {
  DgpConfig config;
  config.n = n;
  config.seed = seed;
  return Generate(config).data;
}

}  // namespace

TEST_CASE("parallel gradients equal the serial reference") {
  const auto data = Data(3000, 5);
  const LossConfig loss = ClaytonAftLoss{3.0, {BaselineFamily::kExtreme, 1.0 / 3}, {BaselineFamily::kExtreme, 1.0 / 3}};
  std::vector<double> pred(data.size());
  Rng rng(2);
  for (double& p : pred) p = 3.0 * rng.Uniform();
  std::vector<GradientPair> a(data.size()), b(data.size());
  kernels::ComputeGradientsSerial(loss, data.time, data.event, pred, a);
  for (int threads : {1, 2, 4}) {
    ThreadScope scope(threads);
    kernels::ComputeGradients(loss, data.time, data.event, pred, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].grad == b[i].grad);
      REQUIRE(a[i].hess == b[i].hess);
    }
  }
}

TEST_CASE("bad gradient rows are reported by index") {
  const LossConfig loss = IndependentAftLoss{};
  std::vector<double> time = {1.0, 2.0, 3.0};
  std::vector<int> event = {1, 1, 1};
  std::vector<double> pred = {0.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
  std::vector<GradientPair> out(3);
  try {
    kernels::ComputeGradients(loss, time, event, pred, out);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  CHECK_THROWS_AS(kernels::ComputeGradientsSerial(loss, time, event, pred, out), NumericError);
}

TEST_CASE("parallel split search equals the serial reference") {
  const auto data = Data(2000, 8);
  Rng rng(4);
  std::vector<GradientPair> g(data.size());
  for (auto& p : g) p = {rng.Normal(), 0.1 + rng.Uniform()};
  const auto sorted = kernels::SortedColumns::Build(data.features);
  // Four open slots plus some rows in finished leaves.
  std::vector<int> slot(data.size());
  std::vector<kernels::NodeSums> sums(4);
  for (std::size_t i = 0; i < slot.size(); ++i) {
    slot[i] = static_cast<int>(i % 5) - 1;
    if (slot[i] >= 0) {
      sums[slot[i]].grad += g[i].grad;
      sums[slot[i]].hess += g[i].hess;
    }
  }
  const kernels::SplitParams params{1.0, 0.0, 1.0};
  std::vector<kernels::SplitCandidate> a(4), b(4);
  kernels::FindBestSplitsSerial(data.features, sorted, g, slot, sums, params, a);
  for (int threads : {1, 3, 4}) {
    ThreadScope scope(threads);
    kernels::FindBestSplits(data.features, sorted, g, slot, sums, params, b);
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(a[s].valid == b[s].valid);
      CHECK(a[s].feature == b[s].feature);
      CHECK(a[s].threshold == b[s].threshold);
      CHECK(a[s].gain == b[s].gain);
    }
  }
}

TEST_CASE("parallel predict and concordance equal the serial reference") {
  const auto data = Data(1500, 9);
  TrainConfig config;
  config.rounds = 20;
  const auto model = Train(data, IndependentAftLoss{{BaselineFamily::kExtreme, 1.0 / 3}}, config);
  std::vector<double> a(data.size()), b(data.size());
  kernels::PredictSerial(model, data.features, a);
  for (int threads : {1, 4}) {
    ThreadScope scope(threads);
    kernels::Predict(model, data.features, b);
    CHECK(a == b);
    const auto cs = kernels::ConcordanceSerial(data.time, data.event, a);
    const auto cp = kernels::Concordance(data.time, data.event, a);
    CHECK(cs.twice_concordant == cp.twice_concordant);
    CHECK(cs.usable == cp.usable);
  }
  kernels::PredictSerial(model, data.features, a, 5);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(a[i] == model.PredictRow(data.features.Row(i), 5));
  }
}

TEST_CASE("split gain formula") {
  const kernels::SplitParams p{1.0, 0.5, 0.0};
  const double gain = kernels::SplitGain(-2.0, 3.0, 4.0, 5.0, p);
  CHECK(gain == doctest::Approx(0.5 * (4.0 / 4.0 + 16.0 / 6.0 - 4.0 / 9.0) - 0.5));
}
