#include <cmath>
#include <limits>
#include <numbers>

#include "claytonboost/distributions.hpp"
#include "claytonboost/error.hpp"
#include "doctest.h"

using namespace claytonboost;

namespace {

constexpr BaselineFamily kFamilies[] = {BaselineFamily::kExtreme, BaselineFamily::kNormal,
                                        BaselineFamily::kLogistic};

bool Close(double a, double b, double rel, double abs) {
  return std::abs(a - b) <= abs + rel * std::abs(b);
}

}  // namespace

TEST_CASE("baseline values at zero") {
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(Cdf(BaselineFamily::kNormal, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Cdf(BaselineFamily::kExtreme, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(Cdf(BaselineFamily::kLogistic, 0.0) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(Pdf(BaselineFamily::kLogistic, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(Pdf(BaselineFamily::kNormal, 0.0) == doctest::Approx(inv_sqrt_2pi).epsilon(1e-15));
  CHECK(Pdf(BaselineFamily::kExtreme, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  for (auto f : kFamilies) CHECK(std::abs(PdfGrad(f, 0.0)) < 1e-15);

  CHECK(PdfHess(BaselineFamily::kNormal, 0.0) == doctest::Approx(-inv_sqrt_2pi).epsilon(1e-15));
  CHECK(PdfHess(BaselineFamily::kExtreme, 0.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-15));
  CHECK(std::abs(PdfHess(BaselineFamily::kNormal, 1.0)) < 1e-15);
}

TEST_CASE("cdf is monotone and survival complements it") {
  for (auto f : kFamilies) {
    double prev = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.01) {
      const double c = Cdf(f, x);
      CHECK(c >= prev);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      CHECK(Survival(f, x) == doctest::Approx(1.0 - c).epsilon(1e-12));
      prev = c;
    }
  }
}

TEST_CASE("derivative chain matches central differences") {
  for (auto f : kFamilies) {
    for (double x = -10.0; x <= 10.0; x += 0.25) {
      const double h = 1e-5;
      const double d_cdf = (Cdf(f, x + h) - Cdf(f, x - h)) / (2 * h);
      const double d_pdf = (Pdf(f, x + h) - Pdf(f, x - h)) / (2 * h);
      const double d_grad = (PdfGrad(f, x + h) - PdfGrad(f, x - h)) / (2 * h);
      INFO("family " << ToString(f) << " x " << x);
      CHECK(Close(d_cdf, Pdf(f, x), 1e-6, 1e-9));
      CHECK(Close(d_pdf, PdfGrad(f, x), 1e-5, 1e-9));
      CHECK(Close(d_grad, PdfHess(f, x), 1e-5, 1e-9));
    }
  }
}

TEST_CASE("densities integrate to one") {
  for (auto f : kFamilies) {
    const int n = 600000;
    const double a = -30.0, b = 30.0, h = (b - a) / n;
    double sum = 0.5 * (Pdf(f, a) + Pdf(f, b));
    for (int i = 1; i < n; ++i) sum += Pdf(f, a + i * h);
    CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("extreme tails stay finite") {
  CHECK(std::isfinite(Pdf(BaselineFamily::kExtreme, 800.0)));
  CHECK(Pdf(BaselineFamily::kExtreme, 800.0) == 0.0);
  CHECK(Survival(BaselineFamily::kExtreme, -40.0) == doctest::Approx(1.0));
}

TEST_CASE("non-finite input is a domain error") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (auto f : kFamilies) {
    CHECK_THROWS_AS(Cdf(f, nan), DomainError);
    CHECK_THROWS_AS(Pdf(f, inf), DomainError);
    CHECK_THROWS_AS(PdfGrad(f, -inf), DomainError);
    CHECK_THROWS_AS(PdfHess(f, nan), DomainError);
  }
}

TEST_CASE("family tags round-trip") {
  for (auto f : kFamilies) CHECK(ParseBaselineFamily(ToString(f)) == f);
  CHECK_THROWS_AS(ParseBaselineFamily("weibull"), ConfigError);
  CHECK_THROWS_AS((BaselineSpec{BaselineFamily::kNormal, 0.0}.Validate()), ConfigError);
}
