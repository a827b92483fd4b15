#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace claytonboost {

// Dense row-major covariate matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> Row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> Row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const { return values_; }

  FeatureMatrix SelectRows(std::span<const std::size_t> rows) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Right-censored observations: observed time t = min(T, U), event = 1{T <= U}.
// Simulated data additionally carries the true event and censoring times.
struct SurvivalDataset {
  FeatureMatrix features;
  std::vector<std::string> feature_names;
  std::vector<double> time;
  std::vector<int> event;
  std::optional<std::vector<double>> true_event_time;
  std::optional<std::vector<double>> true_censor_time;

  std::size_t size() const { return time.size(); }
  bool HasOracle() const { return true_event_time.has_value(); }
  std::size_t EventCount() const;
  double CensoringFraction() const;

  // Throws ShapeError/DataError on inconsistent columns, non-positive times,
  // indicators outside {0, 1} or non-finite features.
  void Validate() const;

  SurvivalDataset Subset(std::span<const std::size_t> rows) const;
};

inline constexpr const char* kTimeColumn = "time";
inline constexpr const char* kEventColumn = "event";
inline constexpr const char* kTrueEventColumn = "true_event_time";
inline constexpr const char* kTrueCensorColumn = "true_censor_time";

// CSV with a header row. Required columns: time, event. Optional oracle columns:
// true_event_time, true_censor_time. Every other column is a feature, in file order.
SurvivalDataset ReadDatasetCsv(const std::filesystem::path& path);
void WriteDatasetCsv(const SurvivalDataset& data, const std::filesystem::path& path);

// Shortest decimal representation that round-trips to the same double.
std::string FormatDouble(double value);

// Minimal comma-separated reader shared by the file readers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Index of a header column, or nullopt.
  std::optional<std::size_t> Column(std::string_view name) const;
};
CsvTable ReadCsv(const std::filesystem::path& path);
double ParseDouble(const std::string& text, const std::filesystem::path& path, std::size_t line,
                   std::string_view column);

}  // namespace claytonboost
