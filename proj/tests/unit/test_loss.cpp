#include <cmath>
#include <vector>

#include "claytonboost/error.hpp"
#include "claytonboost/loss.hpp"
#include "claytonboost/random.hpp"
#include "doctest.h"

using namespace claytonboost;

namespace {

constexpr BaselineFamily kFamilies[] = {BaselineFamily::kExtreme, BaselineFamily::kNormal,
                                        BaselineFamily::kLogistic};

ClaytonAftLoss Spec(double theta, BaselineFamily f, double sz = 1.0, double sv = 1.0) {
  return {theta, {f, sz}, {f, sv}};
}

bool Close(double a, double b, double rel, double abs) {
  return std::abs(a - b) <= abs + rel * std::abs(b);
}

// Full independent-censoring likelihood: the theta -> 0 limit of the copula loss.
double FourTerm(const ClaytonAftLoss& spec, double t, int delta, double yhat) {
  const auto& z = spec.event_baseline;
  const auto& v = spec.censor_baseline;
  const double s = (std::log(t) - yhat) / z.sigma;
  const double r = (std::log(t) - yhat) / v.sigma;
  const double log_f_t = std::log(Pdf(z.family, s) / (z.sigma * t));
  const double log_f_u = std::log(Pdf(v.family, r) / (v.sigma * t));
  const double log_s_t = std::log(Survival(z.family, s));
  const double log_s_u = std::log(Survival(v.family, r));
  return delta == 1 ? -log_f_t - log_s_u : -log_s_t - log_f_u;
}

}  // namespace

TEST_CASE("transform") {
  CHECK(Transform(1.0, 0.0, 1.0) == 0.0);
  CHECK(Transform(std::exp(1.0), 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Transform(std::exp(2.0), 1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(Transform(0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Transform(-1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("clayton loss matches the high-precision oracle") {
  // tests/oracles/clayton_loss_oracle.py: theta 3, extreme/extreme, sigma 1/3
  struct Row {
    double t;
    int delta;
    double yhat, value, grad, hess;
  };
  const Row rows[] = {
      {0.5, 1, 0.0, 0.77547440857117275, 1.8396526256470645, 2.1349484531094667},
      {1.0, 0, 0.2, 0.83928495642157812, 0.65122846541312589, 3.2073024345338821},
      {2.0, 1, 0.5, 1.7211778908062123, -2.4058375989049362, 15.40084856168354},
      {3.5, 0, 1.0, 2.4535746790109243, -3.4250779719982356, 18.867297505255658},
      {0.8, 1, -0.3, 0.61585366337910138, -0.95274896120032995, 9.8541898628183402},
  };
  const auto spec = Spec(3.0, BaselineFamily::kExtreme, 1.0 / 3.0, 1.0 / 3.0);
  for (const Row& r : rows) {
    INFO("t " << r.t << " delta " << r.delta << " yhat " << r.yhat);
    CHECK(std::abs(ClaytonLoss(spec, r.t, r.delta, r.yhat) - r.value) < 1e-10);
    CHECK(Close(ClaytonGrad(spec, r.t, r.delta, r.yhat), r.grad, 1e-10, 1e-10));
    CHECK(Close(ClaytonHess(spec, r.t, r.delta, r.yhat), r.hess, 1e-9, 1e-10));
  }
}

TEST_CASE("near-independence limit at a hand-checked point") {
  const auto spec = Spec(1e-8, BaselineFamily::kNormal);
  const double expected = -std::log(Pdf(BaselineFamily::kNormal, 0.0)) + std::log(2.0);
  CHECK(std::abs(ClaytonLoss(spec, 1.0, 1, 0.0) - expected) < 1e-6);
  const double h = 1e-5;
  const double fd = (ClaytonLoss(spec, 1.0, 1, h) - ClaytonLoss(spec, 1.0, 1, -h)) / (2 * h);
  CHECK(std::abs(ClaytonGrad(spec, 1.0, 1, 0.0) - fd) < 1e-6);
}

TEST_CASE("near-independence limit equals the four-term likelihood") {
  Rng rng(11);
  for (auto f : kFamilies) {
    for (int k = 0; k < 100; ++k) {
      const auto spec = Spec(1e-8, f, 0.4 + rng.Uniform(), 0.4 + rng.Uniform());
      const double t = std::exp(4.0 * rng.Uniform() - 2.0);
      const double yhat = std::log(t) + 1.5 * (2.0 * rng.Uniform() - 1.0);
      const int delta = k % 2;
      CHECK(std::abs(ClaytonLoss(spec, t, delta, yhat) - FourTerm(spec, t, delta, yhat)) < 1e-5);
    }
  }
}

TEST_CASE("symmetric baselines make the event and censored branches coincide") {
  for (auto f : kFamilies) {
    const auto spec = Spec(2.0, f, 0.7, 0.7);
    for (double yhat : {-1.0, 0.0, 0.4, 1.3}) {
      CHECK(ClaytonLoss(spec, 1.7, 1, yhat) == doctest::Approx(ClaytonLoss(spec, 1.7, 0, yhat)));
      CHECK(ClaytonGrad(spec, 1.7, 1, yhat) == doctest::Approx(ClaytonGrad(spec, 1.7, 0, yhat)));
    }
  }
}

TEST_CASE("gradient and hessian match finite differences on a 25-point grid") {
  for (double theta : {0.5, 3.0, 8.0}) {
    for (auto f : kFamilies) {
      const auto spec = Spec(theta, f, 0.8, 1.2);
      for (double t : {0.3, 0.8, 1.0, 2.5, 6.0}) {
        for (double yhat : {-0.8, -0.2, 0.0, 0.5, 1.1}) {
          for (int delta : {0, 1}) {
            const double h = 1e-5;
            const double fd_grad =
                (ClaytonLoss(spec, t, delta, yhat + h) - ClaytonLoss(spec, t, delta, yhat - h)) / (2 * h);
            const double fd_hess =
                (ClaytonGrad(spec, t, delta, yhat + h) - ClaytonGrad(spec, t, delta, yhat - h)) / (2 * h);
            const LossEval raw = ClaytonEvalRaw(spec, t, delta, yhat);
            INFO("theta " << theta << " " << ToString(f) << " t " << t << " yhat " << yhat);
            CHECK(Close(raw.grad, fd_grad, 1e-5, 1e-8));
            CHECK(Close(raw.hess, fd_hess, 1e-4, 1e-8));
          }
        }
      }
    }
  }
}

TEST_CASE("hessian floor") {
  // Deep in the upper tail the clamped survival terms make the raw Hessian negative.
  const auto spec = Spec(3.0, BaselineFamily::kExtreme, 1.0 / 3.0, 1.0 / 3.0);
  bool found = false;
  for (double yhat = -6.0; yhat <= 6.0; yhat += 0.05) {
    for (int delta : {0, 1}) {
      const double raw = ClaytonEvalRaw(spec, 1.0, delta, yhat).hess;
      const double floored = ClaytonHess(spec, 1.0, delta, yhat);
      if (raw < kHessianFloor) {
        found = true;
        CHECK(floored == kHessianFloor);
      } else {
        CHECK(floored == raw);
      }
    }
  }
  CHECK(found);
  CHECK(ClaytonHess(spec, 1.0, 1, 0.0) > 0.0);
  CHECK(ClaytonEvalRaw(spec, 1.0, 1, 0.0).hess > 0.0);
}

TEST_CASE("translation consistency") {
  for (auto f : kFamilies) {
    const auto spec = Spec(3.0, f, 0.5, 0.9);
    for (double a : {-2.0, 0.5, 3.0}) {
      for (int delta : {0, 1}) {
        const double base = ClaytonLoss(spec, 1.3, delta, 0.2);
        const double shifted = ClaytonLoss(spec, 1.3 * std::exp(a), delta, 0.2 + a);
        CHECK(std::abs(shifted - base - a) < 1e-10);
      }
    }
  }
}

TEST_CASE("outputs stay finite across the safeguarded range") {
  for (auto f : kFamilies) {
    for (double theta : {1e-10, 0.5, 3.0, 8.0, 50.0}) {
      const auto spec = Spec(theta, f, 1.0 / 3.0, 1.0 / 3.0);
      for (double log_t = std::log(1e-8); log_t <= std::log(1e8); log_t += 1.7) {
        for (double yhat = -20.0; yhat <= 20.0; yhat += 2.5) {
          for (int delta : {0, 1}) {
            const LossEval e = Evaluate(spec, std::exp(log_t), delta, yhat);
            REQUIRE(std::isfinite(e.value));
            REQUIRE(std::isfinite(e.grad));
            REQUIRE(std::isfinite(e.hess));
            CHECK(e.hess >= kHessianFloor);
          }
        }
      }
    }
  }
}

TEST_CASE("independent loss") {
  const IndependentAftLoss spec{{BaselineFamily::kNormal, 1.0}};
  CHECK(IndependentLoss(spec, 1.0, 1, 0.0) == doctest::Approx(0.918938533204673).epsilon(1e-12));
  // censored rows: loss non-decreasing in yhat is violated only if -log S rises with s
  double prev = IndependentLoss(spec, 2.0, 0, -5.0);
  for (double yhat = -5.0; yhat <= 5.0; yhat += 0.1) {
    const double v = IndependentLoss(spec, 2.0, 0, yhat);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  for (auto f : kFamilies) {
    const IndependentAftLoss s{{f, 0.6}};
    for (double t : {0.3, 1.0, 4.0}) {
      for (double yhat : {-1.0, 0.0, 0.7, 2.0}) {
        for (int delta : {0, 1}) {
          const double h = 1e-5;
          const LossEval raw = IndependentEvalRaw(s, t, delta, yhat);
          const double fd_grad =
              (IndependentLoss(s, t, delta, yhat + h) - IndependentLoss(s, t, delta, yhat - h)) / (2 * h);
          const double fd_hess =
              (IndependentGrad(s, t, delta, yhat + h) - IndependentGrad(s, t, delta, yhat - h)) / (2 * h);
          CHECK(Close(raw.grad, fd_grad, 1e-5, 1e-8));
          CHECK(Close(raw.hess, fd_hess, 1e-5, 1e-7));
          CHECK(IndependentHess(s, t, delta, yhat) == std::max(raw.hess, kHessianFloor));
        }
      }
    }
  }
}

TEST_CASE("loss validation") {
  CHECK_THROWS_AS(Validate(LossConfig{Spec(0.0, BaselineFamily::kNormal)}), ConfigError);
  CHECK_THROWS_AS(Validate(LossConfig{Spec(1.0, BaselineFamily::kNormal, -1.0)}), ConfigError);
  CHECK_NOTHROW(Validate(LossConfig{IndependentAftLoss{}}));
  CHECK_THROWS_AS(ClaytonLoss(Spec(1.0, BaselineFamily::kNormal), 0.0, 1, 0.0), DomainError);
}
