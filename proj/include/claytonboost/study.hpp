#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "claytonboost/booster.hpp"
#include "claytonboost/cv.hpp"
#include "claytonboost/metrics.hpp"
#include "claytonboost/simulate.hpp"
#include "json.hpp"

namespace claytonboost {

struct StudyPoint {
  std::string label;
  CopulaSpec copula;
  double c = 1.49;
};

struct StudyConfig {
  int study = 1;
  int repetitions = 20;
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;
  std::vector<StudyPoint> points;  // filled from `study` when empty
  TrainConfig train;
  CvConfig cv;
  int n_horizons = 9;
  double weibull_shape = 3.0;
  double weibull_scale = 1.0;
  CensorLink censor_link = CensorLink::kExp;
  InduceOn induce_on = InduceOn::kSurvival;

  void Validate() const;
};

// Grid of study 1 (theta sweep), 2 (censoring sweep) or 3 (copula families).
std::vector<StudyPoint> DefaultStudyPoints(int study);
StudyConfig DefaultStudyConfig(int study);
// Keys missing from `j` keep the defaults of the named study. Throws ConfigError.
StudyConfig StudyConfigFromJson(const nlohmann::json& j);
nlohmann::json StudyConfigToJson(const StudyConfig& config);

enum class StudyModel { kClayton, kStandard };
std::string_view ToString(StudyModel model);

// Clayton dependency handed to the Clayton-boost loss for a DGP copula: the
// true theta for Clayton data, else the Clayton theta with the same Kendall tau.
double LossThetaFor(const CopulaSpec& copula);

struct RunRecord {
  std::size_t point = 0;
  int repetition = 0;
  StudyModel model = StudyModel::kClayton;
  double loss_theta = 0.0;
  double censoring_fraction = 0.0;
  int rounds = 0;
  double c_index = 0.0;
  double mae = 0.0;
  double event_mae = 0.0;
  CalibrationCurve calibration;
};

struct SummaryRow {
  std::size_t point = 0;
  StudyModel model = StudyModel::kClayton;
  double censoring_fraction = 0.0;
  double rounds = 0.0;
  double c_index = 0.0;
  double mae = 0.0;
  double event_mae = 0.0;
  CalibrationCurve calibration;  // index-wise mean over repetitions
};

struct StudyResult {
  StudyConfig config;
  std::vector<RunRecord> records;  // sorted by point, repetition, model
  std::vector<SummaryRow> summary;  // sorted by point, model

  const SummaryRow& Summary(std::size_t point, StudyModel model) const;
};

// One repetition at one grid point: simulate train and test sets, select rounds
// by cross-validation, refit and evaluate both models on the test set.
std::vector<RunRecord> RunRepetition(const StudyConfig& config, std::size_t point, int repetition);

// Runs every (point, repetition) pair, in parallel when threads are available.
// With a `partial_dir`, finished pairs are stored there and reused on rerun.
StudyResult RunStudy(const StudyConfig& config,
                     const std::filesystem::path& partial_dir = {},
                     bool verbose = false);

// results.csv, summary.csv, calibration.csv and config.json.
void WriteStudyOutputs(const StudyResult& result, const std::filesystem::path& dir);

}  // namespace claytonboost
