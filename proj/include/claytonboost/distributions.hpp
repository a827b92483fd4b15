#pragma once

#include <string>
#include <string_view>

namespace claytonboost {

// Standardized (location 0, scale 1) baseline error distributions of the AFT model.
// "extreme" is the Gumbel-minimum law, i.e. the law of log(E) for E ~ Exp(1).
enum class BaselineFamily { kExtreme, kNormal, kLogistic };

struct BaselineSpec {
  BaselineFamily family = BaselineFamily::kExtreme;
  double sigma = 1.0;  // scale on the log-time axis, not the standard deviation

  void Validate() const;
};

std::string_view ToString(BaselineFamily family);
BaselineFamily ParseBaselineFamily(std::string_view tag);

// All functions throw DomainError on non-finite x.
double Cdf(BaselineFamily family, double x);
// 1 - Cdf, evaluated without cancellation in the upper tail.
double Survival(BaselineFamily family, double x);
double Pdf(BaselineFamily family, double x);
double PdfGrad(BaselineFamily family, double x);
double PdfHess(BaselineFamily family, double x);

}  // namespace claytonboost
