#include "claytonboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "claytonboost/dataset.hpp"
#include "claytonboost/error.hpp"
#include "claytonboost/kernels.hpp"

namespace claytonboost {

namespace {

void RequireSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

}  // namespace

double Concordance(std::span<const double> time, std::span<const int> event,
                   std::span<const double> predicted_time) {
  RequireSameLength(time.size(), event.size(), "concordance");
  RequireSameLength(time.size(), predicted_time.size(), "concordance");
  const auto counts = kernels::Concordance(time, event, predicted_time);
  if (counts.usable == 0) return 0.5;
  return static_cast<double>(counts.twice_concordant) / (2.0 * static_cast<double>(counts.usable));
}

double Mae(std::span<const double> true_time, std::span<const double> predicted_time) {
  RequireSameLength(true_time.size(), predicted_time.size(), "mae");
  if (true_time.empty()) throw DataError("mae of an empty sample");
  double sum = 0.0;
  for (std::size_t i = 0; i < true_time.size(); ++i) {
    sum += std::abs(true_time[i] - predicted_time[i]);
  }
  return sum / static_cast<double>(true_time.size());
}

double EventMae(std::span<const double> observed_time, std::span<const int> event,
                std::span<const double> predicted_time) {
  RequireSameLength(observed_time.size(), event.size(), "event_mae");
  RequireSameLength(observed_time.size(), predicted_time.size(), "event_mae");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < observed_time.size(); ++i) {
    if (event[i] != 1) continue;
    sum += std::abs(observed_time[i] - predicted_time[i]);
    ++count;
  }
  if (count == 0) throw DataError("event_mae is undefined without events");
  return sum / static_cast<double>(count);
}

double CalibrationCurve::MeanAbsoluteDeviation() const {
  if (horizons.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    sum += std::abs(predicted_proportion[i] - observed_proportion[i]);
  }
  return sum / static_cast<double>(horizons.size());
}

double Quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CalibrationCurve Calibration(std::span<const double> reference_time,
                             std::span<const double> predicted_time, int n_horizons) {
  RequireSameLength(reference_time.size(), predicted_time.size(), "calibration");
  if (n_horizons < 2) throw ConfigError("calibration needs at least 2 horizons");
  if (reference_time.empty()) throw DataError("calibration of an empty sample");

  std::vector<double> ref(reference_time.begin(), reference_time.end());
  std::vector<double> pred(predicted_time.begin(), predicted_time.end());
  std::sort(ref.begin(), ref.end());
  std::sort(pred.begin(), pred.end());

  CalibrationCurve curve;
  if (ref.front() == ref.back()) {
    curve.degenerate = true;
    curve.horizons.push_back(ref.front());
  } else {
    for (int i = 1; i <= n_horizons; ++i) {
      curve.horizons.push_back(Quantile(ref, static_cast<double>(i) / (n_horizons + 1)));
    }
  }
  const auto n = static_cast<double>(ref.size());
  for (double h : curve.horizons) {
    const auto obs = std::upper_bound(ref.begin(), ref.end(), h) - ref.begin();
    const auto prd = std::upper_bound(pred.begin(), pred.end(), h) - pred.begin();
    curve.observed_proportion.push_back(static_cast<double>(obs) / n);
    curve.predicted_proportion.push_back(static_cast<double>(prd) / n);
  }
  return curve;
}

MetricsReport EvaluatePredictions(std::span<const double> time, std::span<const int> event,
                                  std::span<const double> predicted_time,
                                  std::optional<std::span<const double>> true_event_time,
                                  int n_horizons) {
  RequireSameLength(time.size(), predicted_time.size(), "evaluate");
  MetricsReport report;
  report.n_rows = time.size();
  report.n_events = static_cast<std::size_t>(std::count(event.begin(), event.end(), 1));
  report.c_index = Concordance(time, event, predicted_time);
  if (report.n_events > 0) report.event_mae = EventMae(time, event, predicted_time);
  if (true_event_time) {
    report.mae = Mae(*true_event_time, predicted_time);
    report.calibration = Calibration(*true_event_time, predicted_time, n_horizons);
  } else {
    report.calibration_on_observed_times = true;
    report.calibration = Calibration(time, predicted_time, n_horizons);
  }
  return report;
}

nlohmann::json ReportToJson(const MetricsReport& report) {
  nlohmann::json j = {{"c_index", report.c_index},
                      {"n_rows", report.n_rows},
                      {"n_events", report.n_events}};
  if (report.mae) j["mae"] = *report.mae;
  if (report.event_mae) j["event_mae"] = *report.event_mae;
  j["calibration"] = {{"horizons", report.calibration.horizons},
                      {"predicted_proportion", report.calibration.predicted_proportion},
                      {"observed_proportion", report.calibration.observed_proportion},
                      {"degenerate", report.calibration.degenerate},
                      {"mean_abs_deviation", report.calibration.MeanAbsoluteDeviation()}};
  nlohmann::json warnings = nlohmann::json::array();
  if (report.calibration_on_observed_times) {
    warnings.push_back("no true event times: calibration uses observed times");
  }
  if (report.calibration.degenerate) warnings.push_back("all reference times equal");
  j["calibration_on_observed_times"] = report.calibration_on_observed_times;
  j["warnings"] = std::move(warnings);
  return j;
}

void WriteCalibrationCsv(const CalibrationCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write calibration file '" + path.string() + "'");
  out << "horizon,predicted_proportion,observed_proportion\n";
  for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
    out << FormatDouble(curve.horizons[i]) << ',' << FormatDouble(curve.predicted_proportion[i])
        << ',' << FormatDouble(curve.observed_proportion[i]) << '\n';
  }
}

namespace {

// Counts pairs tied in `v` over runs of equal values; v is sorted.
std::uint64_t TiedPairs(std::span<const double> v) {
  std::uint64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i < v.size() && v[i] == v[i - 1]) {
      ++run;
    } else {
      ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

// Merge sort of `y` counting swaps (discordant pairs).
std::uint64_t MergeCountSwaps(std::vector<double>& y, std::vector<double>& buffer, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = MergeCountSwaps(y, buffer, lo, mid) + MergeCountSwaps(y, buffer, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += mid - i;
      buffer[k++] = y[j++];
    } else {
      buffer[k++] = y[i++];
    }
  }
  while (i < mid) buffer[k++] = y[i++];
  while (j < hi) buffer[k++] = y[j++];
  std::copy(buffer.begin() + lo, buffer.begin() + hi, y.begin() + lo);
  return swaps;
}

}  // namespace

double SampleKendallTau(std::span<const double> x, std::span<const double> y) {
  RequireSameLength(x.size(), y.size(), "kendall tau");
  const std::size_t n = x.size();
  if (n < 2) throw DataError("kendall tau needs at least two points");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t x_ties = TiedPairs(xs);
  std::uint64_t joint_ties = 0;
  for (std::size_t i = 0, run = 1; i < n; ++i) {
    if (i + 1 < n && xs[i + 1] == xs[i] && ys[i + 1] == ys[i]) {
      ++run;
    } else {
      joint_ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  std::vector<double> buffer(n);
  const std::uint64_t swaps = MergeCountSwaps(ys, buffer, 0, n);
  const std::uint64_t y_ties = TiedPairs(ys);

  const double numerator = static_cast<double>(total) - static_cast<double>(x_ties) -
                           static_cast<double>(y_ties) + static_cast<double>(joint_ties) -
                           2.0 * static_cast<double>(swaps);
  const double denominator = std::sqrt(static_cast<double>(total - x_ties)) *
                             std::sqrt(static_cast<double>(total - y_ties));
  return denominator > 0.0 ? numerator / denominator : 0.0;
}

}  // namespace claytonboost
