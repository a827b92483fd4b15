#include "claytonboost/cv.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "claytonboost/error.hpp"
#include "claytonboost/metrics.hpp"
#include "claytonboost/random.hpp"

namespace claytonboost {

void CvConfig::Validate() const {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (checkpoint_stride < 1) throw ConfigError("checkpoint_stride must be at least 1");
  if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
  for (double theta : thetas) {
    if (!(theta > 0.0)) throw ConfigError("theta grid values must be positive");
  }
}

std::vector<int> CvConfig::Checkpoints() const {
  std::vector<int> out;
  for (int r = checkpoint_stride; r < max_rounds; r += checkpoint_stride) out.push_back(r);
  out.push_back(max_rounds);
  return out;
}

std::vector<int> StratifiedFolds(const std::vector<int>& event, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > event.size()) {
    throw ConfigError("more folds (" + std::to_string(folds) + ") than rows (" +
                      std::to_string(event.size()) + ")");
  }
  std::vector<std::size_t> events, censored;
  for (std::size_t i = 0; i < event.size(); ++i) (event[i] ? events : censored).push_back(i);
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(events));
  rng.Shuffle(std::span<std::size_t>(censored));

  std::vector<int> fold(event.size());
  std::size_t k = 0;
  for (std::size_t i : events) fold[i] = static_cast<int>(k++ % folds);
  for (std::size_t i : censored) fold[i] = static_cast<int>(k++ % folds);
  return fold;
}

namespace {

LossConfig WithTheta(const LossConfig& loss, std::optional<double> theta) {
  if (!theta) return loss;
  const auto* clayton = std::get_if<ClaytonAftLoss>(&loss);
  if (!clayton) throw ConfigError("a theta grid requires the clayton loss");
  ClaytonAftLoss out = *clayton;
  out.theta = *theta;
  return out;
}

}  // namespace

CvResult CrossValidate(const SurvivalDataset& data, const LossConfig& loss,
                       const TrainConfig& train, const CvConfig& cv) {
  cv.Validate();
  data.Validate();
  Validate(loss);
  const auto fold_of = StratifiedFolds(data.event, cv.folds, cv.seed);
  const auto checkpoints = cv.Checkpoints();

  std::vector<std::optional<double>> grid;
  for (double theta : cv.thetas) grid.emplace_back(theta);
  if (grid.empty()) grid.emplace_back(std::nullopt);

  CvResult result;
  for (const auto& theta : grid) {
    const LossConfig point_loss = WithTheta(loss, theta);
    const std::size_t first = result.points.size();
    for (int r : checkpoints) result.points.push_back({theta, r, {}, 0.0});

    for (int f = 0; f < cv.folds; ++f) {
      std::vector<std::size_t> train_rows, valid_rows;
      for (std::size_t i = 0; i < fold_of.size(); ++i) {
        (fold_of[i] == f ? valid_rows : train_rows).push_back(i);
      }
      const SurvivalDataset fit = data.Subset(train_rows);
      const SurvivalDataset valid = data.Subset(valid_rows);
      TrainConfig config = train;
      config.rounds = cv.max_rounds;
      const TreeEnsemble model = Train(fit, point_loss, config);

      // Validation predictions accumulated tree by tree, scored at checkpoints.
      std::vector<double> pred(valid.size(), model.base_score);
      std::size_t next = 0;
      for (std::size_t k = 0; k < model.trees.size(); ++k) {
        for (std::size_t i = 0; i < valid.size(); ++i) {
          pred[i] += model.learning_rate * model.trees[k].Predict(valid.features.Row(i));
        }
        if (next < checkpoints.size() && static_cast<int>(k + 1) == checkpoints[next]) {
          result.points[first + next].fold_scores.push_back(
              Concordance(valid.time, valid.event, pred));
          ++next;
        }
      }
    }
  }

  for (std::size_t p = 0; p < result.points.size(); ++p) {
    CvPoint& point = result.points[p];
    point.mean_score = std::accumulate(point.fold_scores.begin(), point.fold_scores.end(), 0.0) /
                       static_cast<double>(point.fold_scores.size());
    if (point.mean_score > result.points[result.best].mean_score) result.best = p;
  }

  const CvPoint& best = result.points[result.best];
  TrainConfig config = train;
  config.rounds = best.rounds;
  result.model = Train(data, WithTheta(loss, best.theta), config);
  return result;
}

nlohmann::json CvResultToJson(const CvResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const CvPoint& p : result.points) {
    nlohmann::json j = {{"rounds", p.rounds},
                        {"fold_scores", p.fold_scores},
                        {"mean_c_index", p.mean_score}};
    if (p.theta) j["theta"] = *p.theta;
    points.push_back(std::move(j));
  }
  const CvPoint& best = result.points[result.best];
  nlohmann::json best_json = {{"rounds", best.rounds}, {"mean_c_index", best.mean_score}};
  if (best.theta) best_json["theta"] = *best.theta;
  return {{"best", std::move(best_json)}, {"points", std::move(points)}};
}

}  // namespace claytonboost

namespace claytonboost {

CvConfig CvConfigFromJson(const nlohmann::json& j, CvConfig base) {
  if (!j.is_object()) throw ConfigError("cross-validation config must be a JSON object");
  try {
    base.folds = j.value("folds", base.folds);
    base.thetas = j.value("thetas", base.thetas);
    base.checkpoint_stride = j.value("checkpoint_stride", base.checkpoint_stride);
    base.max_rounds = j.value("max_rounds", base.max_rounds);
    base.seed = j.value("seed", base.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cross-validation config: ") + e.what());
  }
  base.Validate();
  return base;
}

nlohmann::json CvConfigToJson(const CvConfig& config) {
  return {{"folds", config.folds},
          {"thetas", config.thetas},
          {"checkpoint_stride", config.checkpoint_stride},
          {"max_rounds", config.max_rounds},
          {"seed", config.seed}};
}

}  // namespace claytonboost
