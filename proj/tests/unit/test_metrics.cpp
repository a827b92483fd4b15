#include <cmath>
#include <vector>

#include "claytonboost/error.hpp"
#include "claytonboost/metrics.hpp"
#include "claytonboost/random.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace claytonboost;

namespace {

struct Instance {
  std::vector<double> time;
  std::vector<int> event;
  std::vector<double> predicted;
};

// Small integer grids make ties in both time and prediction common.
Instance RandomInstance(Rng& rng, std::size_t n) {
  Instance inst;
  for (std::size_t i = 0; i < n; ++i) {
    inst.time.push_back(static_cast<double>(1 + rng.UniformIndex(10)));
    inst.event.push_back(rng.Uniform() < 0.6 ? 1 : 0);
    inst.predicted.push_back(static_cast<double>(rng.UniformIndex(8)) * 0.5);
  }
  return inst;
}

}  // namespace

TEST_CASE("concordance examples") {
  const std::vector<double> t = {1, 2, 3, 4};
  const std::vector<int> all = {1, 1, 1, 1};
  CHECK(Concordance(t, all, std::vector<double>{1, 2, 3, 4}) == 1.0);
  CHECK(Concordance(t, all, std::vector<double>{4, 3, 2, 1}) == 0.0);
  CHECK(Concordance(t, all, std::vector<double>{7, 7, 7, 7}) == 0.5);
  CHECK(Concordance(std::vector<double>{2, 4, 6}, std::vector<int>{1, 0, 1},
                    std::vector<double>{1, 5, 4}) == 1.0);
  // no usable pairs
  CHECK(Concordance(t, std::vector<int>{0, 0, 0, 0}, std::vector<double>{1, 2, 3, 4}) == 0.5);
  // tied times with one event: the event counts as earlier
  CHECK(Concordance(std::vector<double>{3, 3}, std::vector<int>{1, 0}, std::vector<double>{1, 2}) == 1.0);
  CHECK(Concordance(std::vector<double>{3, 3}, std::vector<int>{1, 1}, std::vector<double>{1, 2}) == 0.5);
}

TEST_CASE("concordance equals brute force on random tied instances") {
  Rng rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = RandomInstance(rng, 5 + rng.UniformIndex(60));
    const auto brute = testing::BruteForceConcordance(inst.time, inst.event, inst.predicted);
    CHECK(Concordance(inst.time, inst.event, inst.predicted) == brute.Index());
  }
}

TEST_CASE("concordance is invariant to monotone prediction transforms") {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = RandomInstance(rng, 40);
    std::vector<double> transformed, flipped;
    for (double p : inst.predicted) {
      transformed.push_back(std::exp(3.0 * p) + 1.0);
      flipped.push_back(-p);
    }
    const double c = Concordance(inst.time, inst.event, inst.predicted);
    CHECK(Concordance(inst.time, inst.event, transformed) == c);
    // reversing predictions swaps concordant and discordant pairs, ties stay
    CHECK(Concordance(inst.time, inst.event, flipped) == doctest::Approx(1.0 - c).epsilon(1e-14));
  }
}

TEST_CASE("absolute errors") {
  const std::vector<double> truth = {1, 2, 3};
  const std::vector<double> pred = {2, 2, 5};
  CHECK(Mae(truth, pred) == 1.0);
  CHECK(EventMae(truth, std::vector<int>{1, 0, 1}, pred) == 1.5);
  CHECK(EventMae(truth, std::vector<int>{0, 1, 0}, pred) == 0.0);
  CHECK_THROWS_AS(EventMae(truth, std::vector<int>{0, 0, 0}, pred), DataError);
  CHECK_THROWS_AS(Mae(truth, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("quantiles and calibration") {
  const std::vector<double> sorted = {1, 2, 3, 4};
  CHECK(Quantile(sorted, 0.0) == 1.0);
  CHECK(Quantile(sorted, 1.0) == 4.0);
  CHECK(Quantile(sorted, 0.5) == 2.5);
  CHECK(Quantile(sorted, 1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-15));

  const auto diagonal = Calibration(sorted, sorted, 2);
  REQUIRE(diagonal.horizons.size() == 2);
  CHECK(diagonal.horizons[0] == doctest::Approx(2.0));
  CHECK(diagonal.horizons[1] == doctest::Approx(3.0));
  CHECK(diagonal.observed_proportion == std::vector<double>{0.5, 0.75});
  CHECK(diagonal.predicted_proportion == diagonal.observed_proportion);
  CHECK(diagonal.MeanAbsoluteDeviation() == 0.0);

  const auto doubled = Calibration(sorted, std::vector<double>{2, 4, 6, 8}, 2);
  CHECK(doubled.predicted_proportion == std::vector<double>{0.25, 0.25});
  CHECK(doubled.MeanAbsoluteDeviation() == doctest::Approx(0.375));

  const auto flat = Calibration(std::vector<double>{5, 5, 5}, std::vector<double>{4, 5, 6}, 9);
  CHECK(flat.degenerate);
  CHECK(flat.horizons.size() == 1);

  CHECK_THROWS_AS(Calibration(sorted, sorted, 1), ConfigError);

  Rng rng(4);
  std::vector<double> ref(500);
  for (double& r : ref) r = rng.Weibull(1.0, 3.0);
  const auto self = Calibration(ref, ref, 9);
  CHECK(self.horizons.size() == 9);
  for (std::size_t k = 1; k < 9; ++k) CHECK(self.horizons[k] > self.horizons[k - 1]);
}

TEST_CASE("evaluation report") {
  const std::vector<double> time = {1, 2, 3, 4};
  const std::vector<int> event = {1, 0, 1, 1};
  const std::vector<double> pred = {1.5, 2, 2.5, 5};
  const std::vector<double> oracle = {1, 2.5, 3, 4};
  const auto with = EvaluatePredictions(time, event, pred, std::span<const double>(oracle), 2);
  REQUIRE(with.mae);
  CHECK(*with.mae == doctest::Approx((0.5 + 0.5 + 0.5 + 1.0) / 4));
  CHECK(!with.calibration_on_observed_times);
  CHECK(with.n_events == 3);

  const auto without = EvaluatePredictions(time, event, pred, std::nullopt, 2);
  CHECK(!without.mae);
  REQUIRE(without.event_mae);
  CHECK(without.calibration_on_observed_times);
  const auto j = ReportToJson(without);
  CHECK(!j.contains("mae"));
  CHECK(!j.at("warnings").empty());
}

TEST_CASE("sample kendall tau matches brute force") {
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rng.UniformIndex(80);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.UniformIndex(12));
      y[i] = static_cast<double>(rng.UniformIndex(12)) + 0.1 * x[i];
    }
    double concordant = 0, discordant = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = (x[i] - x[j]) * (y[i] - y[j]);
        if (x[i] == x[j] && y[i] == y[j]) continue;
        if (x[i] == x[j]) {
          ++tx;
        } else if (y[i] == y[j]) {
          ++ty;
        } else if (s > 0) {
          ++concordant;
        } else {
          ++discordant;
        }
      }
    }
    const double n0 = concordant + discordant;
    const double expected = (concordant - discordant) / std::sqrt((n0 + tx) * (n0 + ty));
    CHECK(SampleKendallTau(x, y) == doctest::Approx(expected).epsilon(1e-12));
  }
}
