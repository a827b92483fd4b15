#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace claytonboost {

// Seedable random stream with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
// standard library distributions are implementation-defined, so every variate
// is generated here from raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform();
  double Normal();
  double Exponential();
  // Gamma(shape, 1), Marsaglia-Tsang. shape > 0.
  double Gamma(double shape);
  // Weibull with density (k/l)(x/l)^(k-1) exp(-(x/l)^k).
  double Weibull(double scale, double shape);
  // Uniform integer in [0, n).
  std::uint64_t UniformIndex(std::uint64_t n);

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Derives an independent stream seed from a base seed and a stream index (splitmix64).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace claytonboost
