#include "claytonboost/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "claytonboost/error.hpp"

namespace claytonboost {
namespace {

// exp(x) inside the extreme-value density saturates here instead of overflowing.
constexpr double kMaxInnerExponent = 700.0;

void CheckFinite(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("baseline distribution evaluated at a non-finite point");
  }
}

double ClampedExp(double x) { return std::exp(std::min(x, kMaxInnerExponent)); }

// Logistic sigmoid without overflow for large |x|.
double Sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void BaselineSpec::Validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("baseline sigma must be a positive finite number");
  }
}

std::string_view ToString(BaselineFamily family) {
  switch (family) {
    case BaselineFamily::kExtreme:
      return "extreme";
    case BaselineFamily::kNormal:
      return "normal";
    case BaselineFamily::kLogistic:
      return "logistic";
  }
  return "unknown";
}

BaselineFamily ParseBaselineFamily(std::string_view tag) {
  if (tag == "extreme") return BaselineFamily::kExtreme;
  if (tag == "normal") return BaselineFamily::kNormal;
  if (tag == "logistic") return BaselineFamily::kLogistic;
  throw ConfigError("unknown baseline family '" + std::string(tag) + "'");
}

double Cdf(BaselineFamily family, double x) {
  CheckFinite(x);
  switch (family) {
    case BaselineFamily::kExtreme:
      return -std::expm1(-ClampedExp(x));
    case BaselineFamily::kNormal:
      return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    case BaselineFamily::kLogistic:
      return Sigmoid(x);
  }
  return 0.0;
}

double Survival(BaselineFamily family, double x) {
  CheckFinite(x);
  switch (family) {
    case BaselineFamily::kExtreme:
      return std::exp(-ClampedExp(x));
    case BaselineFamily::kNormal:
      return 0.5 * std::erfc(x / std::numbers::sqrt2);
    case BaselineFamily::kLogistic:
      return Sigmoid(-x);
  }
  return 0.0;
}

double Pdf(BaselineFamily family, double x) {
  CheckFinite(x);
  switch (family) {
    case BaselineFamily::kExtreme:
      return std::exp(x - ClampedExp(x));
    case BaselineFamily::kNormal:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case BaselineFamily::kLogistic: {
      const double p = Sigmoid(x);
      return p * (1.0 - p);
    }
  }
  return 0.0;
}

double PdfGrad(BaselineFamily family, double x) {
  const double f = Pdf(family, x);
  switch (family) {
    case BaselineFamily::kExtreme:
      return f * (1.0 - ClampedExp(x));
    case BaselineFamily::kNormal:
      return -x * f;
    case BaselineFamily::kLogistic:
      // (e^-x - 1) / (1 + e^-x) == 1 - 2 sigmoid(x) == -tanh(x/2)
      return -f * std::tanh(0.5 * x);
  }
  return 0.0;
}

double PdfHess(BaselineFamily family, double x) {
  const double f = Pdf(family, x);
  switch (family) {
    case BaselineFamily::kExtreme: {
      const double ex = ClampedExp(x);
      return f * ((1.0 - ex) * (1.0 - ex) - ex);
    }
    case BaselineFamily::kNormal:
      return (x * x - 1.0) * f;
    case BaselineFamily::kLogistic: {
      // f'' = f ((1 - 2p)^2 - 2 p (1 - p)) with p = sigmoid(x)
      const double u = std::tanh(0.5 * x);
      return f * (u * u - 2.0 * f);
    }
  }
  return 0.0;
}

}  // namespace claytonboost
