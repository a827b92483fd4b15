#include "claytonboost/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost {
namespace {

double ClampSurvival(double s) {
  return std::clamp(s, kSurvivalEpsilon, 1.0 - kSurvivalEpsilon);
}

void CheckDelta(int delta) {
  if (delta != 0 && delta != 1) throw DomainError("event indicator must be 0 or 1");
}

// Quantities of one margin at the transformed point q, with dq/dyhat = -1/sigma.
struct Margin {
  double survival;    // clamped 1 - F(q)
  double log_pdf;     // log f(q), floored
  double hazard;      // f(q) / survival
  double score;       // f'(q) / f(q)
  double curvature;   // f''(q) / f(q)
  double dq;          // dq / dyhat
  double log_jacobian;  // log(sigma t)
};

Margin MakeMargin(const BaselineSpec& baseline, double t, double yhat) {
  const double q = Transform(t, yhat, baseline.sigma);
  const double pdf = Pdf(baseline.family, q);
  const double safe_pdf = std::max(pdf, kLogFloor);
  Margin m;
  m.survival = ClampSurvival(Survival(baseline.family, q));
  m.log_pdf = std::log(safe_pdf);
  m.hazard = pdf / m.survival;
  m.score = PdfGrad(baseline.family, q) / safe_pdf;
  m.curvature = PdfHess(baseline.family, q) / safe_pdf;
  m.dq = -1.0 / baseline.sigma;
  m.log_jacobian = std::log(baseline.sigma * t);
  return m;
}

void CheckFiniteResult(const LossEval& e) {
  if (!std::isfinite(e.value) || !std::isfinite(e.grad) || !std::isfinite(e.hess)) {
    throw NumericError("loss evaluation produced a non-finite value");
  }
}

}  // namespace

void ClaytonAftLoss::Validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ConfigError("clayton loss requires theta > 0");
  }
  event_baseline.Validate();
  censor_baseline.Validate();
}

void IndependentAftLoss::Validate() const { event_baseline.Validate(); }

void Validate(const LossConfig& loss) {
  std::visit([](const auto& l) { l.Validate(); }, loss);
}

double Transform(double t, double yhat, double sigma) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return (std::log(t) - yhat) / sigma;
}

LossEval ClaytonEvalRaw(const ClaytonAftLoss& spec, double t, int delta, double yhat) {
  CheckDelta(delta);
  const double theta = spec.theta;
  const Margin z = MakeMargin(spec.event_baseline, t, yhat);
  const Margin v = MakeMargin(spec.censor_baseline, t, yhat);

  // D = A + B - 1 with A = S_Z^-theta, B = S_V^-theta; A, B >= 1 so D >= 1.
  const double la = -theta * std::log(z.survival);
  const double lb = -theta * std::log(v.survival);
  const double top = std::max(la, lb);
  double log_d;
  if (top < 0.5) {
    // Near independence A - 1 and B - 1 are tiny; keep them exact.
    log_d = std::log1p(std::expm1(la) + std::expm1(lb));
  } else {
    log_d = top + std::log(std::exp(la - top) + std::exp(lb - top) - std::exp(-top));
  }
  log_d = std::max(log_d, std::log(kLogFloor));
  // Shares A / D and B / D, each in (0, 1].
  const double wa = std::exp(la - log_d);
  const double wb = std::exp(lb - log_d);

  // N / D where N = S_Z^-(1+theta) f_Z ds + S_V^-(1+theta) f_V dr.
  const double ratio = wa * z.hazard * z.dq + wb * v.hazard * v.dq;
  // dN / D.
  const double dratio =
      wa * z.dq * z.dq * ((1.0 + theta) * z.hazard * z.hazard + z.score * z.hazard) +
      wb * v.dq * v.dq * ((1.0 + theta) * v.hazard * v.hazard + v.score * v.hazard);

  LossEval out;
  out.value = (1.0 + 1.0 / theta) * log_d;
  out.grad = (1.0 + theta) * ratio;
  out.hess = (1.0 + theta) * (dratio - theta * ratio * ratio);

  // Branch term g(delta, t) of the observed margin W (Z if delta = 1, V otherwise).
  const Margin& w = delta == 1 ? z : v;
  out.value += (1.0 + theta) * std::log(w.survival) - w.log_pdf + w.log_jacobian;
  out.grad += -(1.0 + theta) * w.hazard * w.dq - w.score * w.dq;
  out.hess += -(1.0 + theta) * w.dq * w.dq * (w.score * w.hazard + w.hazard * w.hazard) -
              w.dq * w.dq * w.curvature + w.dq * w.dq * w.score * w.score;
  CheckFiniteResult(out);
  return out;
}

double ClaytonLoss(const ClaytonAftLoss& spec, double t, int delta, double yhat) {
  return ClaytonEvalRaw(spec, t, delta, yhat).value;
}

double ClaytonGrad(const ClaytonAftLoss& spec, double t, int delta, double yhat) {
  return ClaytonEvalRaw(spec, t, delta, yhat).grad;
}

double ClaytonHess(const ClaytonAftLoss& spec, double t, int delta, double yhat) {
  return std::max(ClaytonEvalRaw(spec, t, delta, yhat).hess, kHessianFloor);
}

LossEval IndependentEvalRaw(const IndependentAftLoss& spec, double t, int delta, double yhat) {
  CheckDelta(delta);
  const Margin z = MakeMargin(spec.event_baseline, t, yhat);
  const double dq2 = z.dq * z.dq;
  LossEval out;
  if (delta == 1) {
    out.value = -z.log_pdf + z.log_jacobian;
    out.grad = -z.score * z.dq;
    out.hess = -dq2 * (z.curvature - z.score * z.score);
  } else {
    out.value = -std::log(z.survival);
    out.grad = z.hazard * z.dq;
    out.hess = dq2 * (z.score * z.hazard + z.hazard * z.hazard);
  }
  CheckFiniteResult(out);
  return out;
}

double IndependentLoss(const IndependentAftLoss& spec, double t, int delta, double yhat) {
  return IndependentEvalRaw(spec, t, delta, yhat).value;
}

double IndependentGrad(const IndependentAftLoss& spec, double t, int delta, double yhat) {
  return IndependentEvalRaw(spec, t, delta, yhat).grad;
}

double IndependentHess(const IndependentAftLoss& spec, double t, int delta, double yhat) {
  return std::max(IndependentEvalRaw(spec, t, delta, yhat).hess, kHessianFloor);
}

LossEval Evaluate(const LossConfig& loss, double t, int delta, double yhat) {
  LossEval e = std::visit(
      [&](const auto& l) -> LossEval {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ClaytonAftLoss>) {
          return ClaytonEvalRaw(l, t, delta, yhat);
        } else {
          return IndependentEvalRaw(l, t, delta, yhat);
        }
      },
      loss);
  e.hess = std::max(e.hess, kHessianFloor);
  return e;
}

}  // namespace claytonboost
