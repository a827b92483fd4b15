#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "claytonboost/dataset.hpp"
#include "claytonboost/kernels.hpp"
#include "claytonboost/loss.hpp"
#include "claytonboost/tree.hpp"
#include "json.hpp"

namespace claytonboost {

struct TrainConfig {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  std::optional<double> base_score;  // nullopt: mean log observed time
  std::uint64_t seed = 0;  // recorded with the model; training itself is deterministic

  void Validate() const;
  kernels::SplitParams SplitParameters() const { return {lambda, gamma, min_child_weight}; }
};

// Keys missing from `j` keep their values in `base`. Throws ConfigError.
TrainConfig TrainConfigFromJson(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json TrainConfigToJson(const TrainConfig& config);

// Called after every boosting round with the 1-based round index and the
// updated training predictions.
using RoundCallback = std::function<void(int round, std::span<const double> predictions)>;

// Fills per-row gradient pairs at the given predictions.
using GradientFunction =
    std::function<void(std::span<const double> predictions, std::span<GradientPair> out)>;

// Grows one regression tree by exact greedy level-wise search on (grad, hess).
RegressionTree GrowTree(const FeatureMatrix& features, const kernels::SortedColumns& sorted,
                        std::span<const GradientPair> gradients, const TrainConfig& config);

// Second-order boosting on the survival loss.
TreeEnsemble Train(const SurvivalDataset& data, const LossConfig& loss, const TrainConfig& config,
                   const RoundCallback& on_round = {});

// Boosting on an arbitrary objective supplied through its gradients. `loss` is
// only recorded in the returned model.
TreeEnsemble TrainWithGradients(const FeatureMatrix& features, double base_score,
                                const GradientFunction& gradients, const TrainConfig& config,
                                const LossConfig& loss, const RoundCallback& on_round = {});

// Predicted log event time h(x) per row. Throws ShapeError on a feature-count mismatch.
std::vector<double> Predict(const TreeEnsemble& model, const FeatureMatrix& features);
// exp(h(x)) per row.
std::vector<double> PredictTime(const TreeEnsemble& model, const FeatureMatrix& features);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json LossToJson(const LossConfig& loss);
LossConfig LossFromJson(const nlohmann::json& j);
nlohmann::json ModelToJson(const TreeEnsemble& model);
TreeEnsemble ModelFromJson(const nlohmann::json& j);

void SaveModel(const TreeEnsemble& model, const std::filesystem::path& path);
// Throws PersistenceError naming the offending field.
TreeEnsemble LoadModel(const std::filesystem::path& path);

}  // namespace claytonboost
