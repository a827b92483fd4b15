#include "claytonboost/copula.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost {
namespace {

void CheckUnit(double u, const char* name) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(std::string("copula argument ") + name + " outside [0, 1]");
  }
}

double SimpsonStep(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return SimpsonStep(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         SimpsonStep(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature to absolute tolerance `tol`.
double Integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return SimpsonStep(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

void CopulaSpec::Validate() const {
  const bool finite = std::isfinite(theta);
  switch (family) {
    case CopulaFamily::kClayton:
      if (!finite || !(theta > 0.0)) throw ConfigError("clayton copula requires theta > 0");
      break;
    case CopulaFamily::kGumbel:
      if (!finite || !(theta >= 1.0)) throw ConfigError("gumbel copula requires theta >= 1");
      break;
    case CopulaFamily::kFrank:
      if (!finite || theta == 0.0) throw ConfigError("frank copula requires theta != 0");
      break;
    case CopulaFamily::kIndependent:
      break;
  }
}

std::string_view ToString(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::kClayton:
      return "clayton";
    case CopulaFamily::kGumbel:
      return "gumbel";
    case CopulaFamily::kFrank:
      return "frank";
    case CopulaFamily::kIndependent:
      return "independent";
  }
  return "unknown";
}

CopulaFamily ParseCopulaFamily(std::string_view tag) {
  if (tag == "clayton") return CopulaFamily::kClayton;
  if (tag == "gumbel") return CopulaFamily::kGumbel;
  if (tag == "frank") return CopulaFamily::kFrank;
  if (tag == "independent") return CopulaFamily::kIndependent;
  throw ConfigError("unknown copula family '" + std::string(tag) + "'");
}

double ClaytonGenerator(double theta, double t) {
  if (!(theta > 0.0)) throw DomainError("clayton generator requires theta > 0");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("clayton generator requires t in (0, 1]");
  // expm1 keeps precision when theta * log(t) is small.
  return std::expm1(-theta * std::log(t)) / theta;
}

double ClaytonGeneratorInv(double theta, double s) {
  if (!(theta > 0.0)) throw DomainError("clayton generator inverse requires theta > 0");
  if (!(s >= 0.0) || std::isnan(s)) {
    throw DomainError("clayton generator inverse requires s >= 0");
  }
  return std::exp(-std::log1p(s * theta) / theta);
}

double CopulaCdf(const CopulaSpec& spec, double u, double v) {
  spec.Validate();
  CheckUnit(u, "u");
  CheckUnit(v, "v");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double theta = spec.theta;
  switch (spec.family) {
    case CopulaFamily::kClayton:
      return ClaytonGeneratorInv(theta,
                                 ClaytonGenerator(theta, u) + ClaytonGenerator(theta, v));
    case CopulaFamily::kGumbel: {
      const double a = std::pow(-std::log(u), theta);
      const double b = std::pow(-std::log(v), theta);
      return std::exp(-std::pow(a + b, 1.0 / theta));
    }
    case CopulaFamily::kFrank: {
      const double num = std::expm1(-theta * u) * std::expm1(-theta * v);
      return -std::log1p(num / std::expm1(-theta)) / theta;
    }
    case CopulaFamily::kIndependent:
      return u * v;
  }
  return 0.0;
}

double Debye1(double x) {
  if (x == 0.0) return 1.0;
  const auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  return Integrate(integrand, 0.0, x, 1e-10) / x;
}

double KendallTau(const CopulaSpec& spec) {
  spec.Validate();
  switch (spec.family) {
    case CopulaFamily::kClayton:
      return spec.theta / (spec.theta + 2.0);
    case CopulaFamily::kGumbel:
      return (spec.theta - 1.0) / spec.theta;
    case CopulaFamily::kFrank:
      return 1.0 + 4.0 / spec.theta * (Debye1(spec.theta) - 1.0);
    case CopulaFamily::kIndependent:
      return 0.0;
  }
  return 0.0;
}

double SampleStable(double alpha, double beta, double gamma, double delta, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0) {
    throw NumericError("stable sampler supports alpha in (0, 1) u (1, 2]");
  }
  const double half_pi = 0.5 * std::numbers::pi;
  const double v = std::numbers::pi * rng.Uniform() - half_pi;
  const double w = rng.Exponential();
  const double tan_term = beta * std::tan(half_pi * alpha);
  const double b = std::atan(tan_term) / alpha;
  const double s = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return gamma * x + delta;
}

std::pair<double, double> SamplePair(const CopulaSpec& spec, Rng& rng) {
  spec.Validate();
  const double theta = spec.theta;
  switch (spec.family) {
    case CopulaFamily::kClayton: {
      // Marshall-Olkin with a Gamma(1/theta) frailty.
      const double k = rng.Gamma(1.0 / theta);
      const double x1 = rng.Uniform();
      const double x2 = rng.Uniform();
      const auto w = [&](double x) { return std::exp(-std::log1p(-std::log(x) / k) / theta); };
      const double w1 = w(x1);
      const double w2 = w(x2);
      return {w1, w2};
    }
    case CopulaFamily::kGumbel: {
      const double v1 = rng.Uniform();
      const double v2 = rng.Uniform();
      double z = 1.0;  // theta == 1: the mixing law is a point mass at 1
      if (theta > 1.0) {
        const double alpha = 1.0 / theta;
        z = SampleStable(alpha, 1.0, std::pow(std::cos(std::numbers::pi / (2.0 * theta)), theta),
                         0.0, rng);
      }
      if (!(z > 0.0) || !std::isfinite(z)) {
        throw NumericError("positive stable draw failed for gumbel theta " +
                           std::to_string(theta));
      }
      const auto u = [&](double v) { return std::exp(-std::pow(-std::log(v) / z, 1.0 / theta)); };
      const double u1 = u(v1);
      const double u2 = u(v2);
      return {u1, u2};
    }
    case CopulaFamily::kFrank: {
      const double v = rng.Uniform();
      const double u1 = rng.Uniform();
      const double e = std::exp(-theta * u1);
      const double u2 =
          -std::log1p(-std::expm1(-theta) * v / (v * (e - 1.0) - e)) / theta;
      return {u1, u2};
    }
    case CopulaFamily::kIndependent: {
      const double u1 = rng.Uniform();
      const double u2 = rng.Uniform();
      return {u1, u2};
    }
  }
  return {0.0, 0.0};
}

}  // namespace claytonboost
