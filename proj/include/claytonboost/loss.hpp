#pragma once

#include <variant>

#include "claytonboost/distributions.hpp"

namespace claytonboost {

// Survival probabilities are clamped to [kSurvivalEpsilon, 1 - kSurvivalEpsilon]
// before entering a logarithm or a negative power.
inline constexpr double kSurvivalEpsilon = 1e-12;
// Floor for arguments of log() (densities underflow in the far tails).
inline constexpr double kLogFloor = 1e-300;
// Second-order boosting needs positive curvature; Hessians are floored here.
inline constexpr double kHessianFloor = 1e-6;

// Negative log-likelihood under a Clayton survival copula between event and
// censoring time, both AFT with a shared predictor yhat = h(x).
struct ClaytonAftLoss {
  double theta = 1.0;
  BaselineSpec event_baseline;   // Z, sigma_Z
  BaselineSpec censor_baseline;  // V, sigma_V

  void Validate() const;
};

// Negative log-likelihood under independent censoring (the AFT boosting comparator).
struct IndependentAftLoss {
  BaselineSpec event_baseline;

  void Validate() const;
};

using LossConfig = std::variant<ClaytonAftLoss, IndependentAftLoss>;

// Per-observation value and derivatives with respect to yhat.
struct LossEval {
  double value = 0.0;
  double grad = 0.0;
  double hess = 0.0;
};

// (log t - yhat) / sigma. Throws DomainError for t <= 0.
double Transform(double t, double yhat, double sigma);

double ClaytonLoss(const ClaytonAftLoss& spec, double t, int delta, double yhat);
double ClaytonGrad(const ClaytonAftLoss& spec, double t, int delta, double yhat);
// Floored at kHessianFloor.
double ClaytonHess(const ClaytonAftLoss& spec, double t, int delta, double yhat);
// Value, gradient and unfloored Hessian in one pass.
LossEval ClaytonEvalRaw(const ClaytonAftLoss& spec, double t, int delta, double yhat);

double IndependentLoss(const IndependentAftLoss& spec, double t, int delta, double yhat);
double IndependentGrad(const IndependentAftLoss& spec, double t, int delta, double yhat);
double IndependentHess(const IndependentAftLoss& spec, double t, int delta, double yhat);
LossEval IndependentEvalRaw(const IndependentAftLoss& spec, double t, int delta, double yhat);

// Dispatch on the configured loss; the returned Hessian is floored.
LossEval Evaluate(const LossConfig& loss, double t, int delta, double yhat);

void Validate(const LossConfig& loss);

}  // namespace claytonboost
