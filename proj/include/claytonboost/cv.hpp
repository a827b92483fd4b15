#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "claytonboost/booster.hpp"
#include "claytonboost/dataset.hpp"
#include "json.hpp"

namespace claytonboost {

struct CvConfig {
  int folds = 2;
  // Candidate Clayton dependency parameters. Empty: keep the loss as given.
  std::vector<double> thetas;
  int checkpoint_stride = 50;
  int max_rounds = 500;
  std::uint64_t seed = 0;

  void Validate() const;
  // stride, 2 stride, ..., with max_rounds always last.
  std::vector<int> Checkpoints() const;
};

CvConfig CvConfigFromJson(const nlohmann::json& j, CvConfig base = {});
nlohmann::json CvConfigToJson(const CvConfig& config);

// Fold index per row; events and censored rows are spread evenly over folds.
std::vector<int> StratifiedFolds(const std::vector<int>& event, int folds, std::uint64_t seed);

struct CvPoint {
  std::optional<double> theta;
  int rounds = 0;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct CvResult {
  std::vector<CvPoint> points;
  std::size_t best = 0;
  TreeEnsemble model;  // refit on all rows at the best point
};

// Grid search maximizing mean validation c-index. One training run per fold
// and theta; round counts are scored at checkpoints of that run. Ties keep the
// earliest point (grid order, then fewer rounds).
CvResult CrossValidate(const SurvivalDataset& data, const LossConfig& loss,
                       const TrainConfig& train, const CvConfig& cv);

nlohmann::json CvResultToJson(const CvResult& result);

}  // namespace claytonboost
