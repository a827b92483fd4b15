#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace claytonboost {

// Harrell's c-index on predicted event times (larger prediction = longer survival).
// A pair is usable when the shorter observed time is an event; a tie in observed
// time with exactly one event treats the event as earlier. Prediction ties count
// one half. Returns 0.5 when no pair is usable.
double Concordance(std::span<const double> time, std::span<const int> event,
                   std::span<const double> predicted_time);

double Mae(std::span<const double> true_time, std::span<const double> predicted_time);
// Mean absolute error over event rows only. Throws DataError without events.
double EventMae(std::span<const double> observed_time, std::span<const int> event,
                std::span<const double> predicted_time);

struct CalibrationCurve {
  std::vector<double> horizons;
  std::vector<double> predicted_proportion;
  std::vector<double> observed_proportion;
  bool degenerate = false;  // all reference times equal: a single horizon

  // Mean |predicted - observed| over horizons.
  double MeanAbsoluteDeviation() const;
};

// Cumulative proportions of reference and predicted times at the type-7
// empirical quantiles i / (n_horizons + 1) of the reference times.
CalibrationCurve Calibration(std::span<const double> reference_time,
                             std::span<const double> predicted_time, int n_horizons = 9);

// Type-7 (linear interpolation) empirical quantile of sorted values.
double Quantile(std::span<const double> sorted, double level);

struct MetricsReport {
  double c_index = 0.5;
  std::optional<double> mae;
  std::optional<double> event_mae;
  CalibrationCurve calibration;
  bool calibration_on_observed_times = false;
  std::size_t n_rows = 0;
  std::size_t n_events = 0;
};

// `true_event_time` is the oracle, when known; calibration then uses it.
MetricsReport EvaluatePredictions(std::span<const double> time, std::span<const int> event,
                                  std::span<const double> predicted_time,
                                  std::optional<std::span<const double>> true_event_time,
                                  int n_horizons = 9);

nlohmann::json ReportToJson(const MetricsReport& report);
void WriteCalibrationCsv(const CalibrationCurve& curve, const std::filesystem::path& path);

// Sample Kendall's tau-b in O(n log n).
double SampleKendallTau(std::span<const double> x, std::span<const double> y);

}  // namespace claytonboost
