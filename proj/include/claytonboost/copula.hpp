#pragma once

#include <string_view>
#include <utility>

#include "claytonboost/random.hpp"

namespace claytonboost {

enum class CopulaFamily { kClayton, kGumbel, kFrank, kIndependent };

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::kIndependent;
  double theta = 0.0;  // ignored for kIndependent

  // clayton: theta > 0; gumbel: theta >= 1; frank: theta != 0. Throws ConfigError.
  void Validate() const;
};

std::string_view ToString(CopulaFamily family);
CopulaFamily ParseCopulaFamily(std::string_view tag);

// Clayton generator (t^-theta - 1) / theta, t in (0, 1].
double ClaytonGenerator(double theta, double t);
// Its inverse (s theta + 1)^(-1/theta), s >= 0.
double ClaytonGeneratorInv(double theta, double s);

// C_theta(u, v) for u, v in [0, 1].
double CopulaCdf(const CopulaSpec& spec, double u, double v);

// Population Kendall's tau of the copula.
double KendallTau(const CopulaSpec& spec);

// Debye function of the first kind, D1(x) = (1/x) * integral_0^x t / (e^t - 1) dt.
double Debye1(double x);

// One draw (W1, W2) with uniform margins and joint law C_theta.
std::pair<double, double> SamplePair(const CopulaSpec& spec, Rng& rng);

// Chambers-Mallows-Stuck draw from S(alpha, beta, gamma, delta) in the
// one-parameterization, alpha in (0, 1) u (1, 2].
double SampleStable(double alpha, double beta, double gamma, double delta, Rng& rng);

}  // namespace claytonboost
