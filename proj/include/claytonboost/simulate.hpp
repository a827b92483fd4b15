#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "claytonboost/copula.hpp"
#include "claytonboost/dataset.hpp"
#include "claytonboost/loss.hpp"
#include "claytonboost/random.hpp"
#include "json.hpp"

namespace claytonboost {

// How the censoring constant c scales the censoring draw R2.
enum class CensorLink {
  kExp,     // U = exp(c) * R2
  kLinear,  // U = c * R2
};

// Which margin the copula ranks are attached to.
enum class InduceOn {
  kSurvival,      // large W means short time, i.e. the copula couples S_T and S_U
  kDistribution,  // large W means long time, i.e. the copula couples F_T and F_U
};

struct DgpConfig {
  std::size_t n = 1000;
  double c = 1.49;
  CopulaSpec copula{CopulaFamily::kClayton, 3.0};
  double weibull_shape = 3.0;
  double weibull_scale = 1.0;
  std::size_t n_features = 10;
  std::uint64_t seed = 0;
  CensorLink censor_link = CensorLink::kExp;
  InduceOn induce_on = InduceOn::kSurvival;

  void Validate() const;
};

std::string_view ToString(CensorLink link);
std::string_view ToString(InduceOn orientation);

nlohmann::json DgpToJson(const DgpConfig& config);
// Missing keys keep their defaults. Throws ConfigError.
DgpConfig DgpFromJson(const nlohmann::json& j);

// X1 X2 + X3^3 / 2 + X4 X5 + 0.8 exp(-X6) + X7 sin(2 X8). Needs at least 8 entries.
double HFunction(std::span<const double> x);

struct Margins {
  std::vector<double> event_time;   // T = exp(h(X)) * R1, coupled row-wise to X
  std::vector<double> censor_time;  // U
  FeatureMatrix features;
};

Margins DrawMargins(const DgpConfig& config, Rng& rng);

// Reorders (T, X) and U so that their ranks follow n copula draws. The multisets
// of T and U are unchanged and X rows travel with their T.
Margins InduceRankCorrelation(const Margins& margins, const CopulaSpec& copula, InduceOn orientation,
                              Rng& rng);

struct SimulatedDataset {
  SurvivalDataset data;
  DgpConfig config;
  double censoring_fraction = 0.0;
  // Loss the simulated data is drawn from: extreme baselines with sigma = 1/k.
  ClaytonAftLoss implied_loss;
};

SimulatedDataset Generate(const DgpConfig& config);

nlohmann::json MetadataToJson(const SimulatedDataset& sim);
void WriteMetadata(const SimulatedDataset& sim, const std::filesystem::path& path);

}  // namespace claytonboost
