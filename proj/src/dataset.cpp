#include "claytonboost/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "claytonboost/error.hpp"

namespace claytonboost {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string Location(const std::filesystem::path& path, std::size_t line) {
  return "'" + path.string() + "' line " + std::to_string(line);
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ShapeError("feature matrix storage does not match its dimensions");
  }
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = Row(rows[i]);
    std::copy(src.begin(), src.end(), out.Row(i).begin());
  }
  return out;
}

std::size_t SurvivalDataset::EventCount() const {
  std::size_t n = 0;
  for (int e : event) n += e == 1;
  return n;
}

double SurvivalDataset::CensoringFraction() const {
  if (size() == 0) return 0.0;
  return 1.0 - static_cast<double>(EventCount()) / static_cast<double>(size());
}

void SurvivalDataset::Validate() const {
  const std::size_t n = time.size();
  if (event.size() != n || features.rows() != n) {
    throw ShapeError("dataset columns have different lengths");
  }
  if (!feature_names.empty() && feature_names.size() != features.cols()) {
    throw ShapeError("feature name count does not match the feature matrix");
  }
  if ((true_event_time && true_event_time->size() != n) ||
      (true_censor_time && true_censor_time->size() != n)) {
    throw ShapeError("oracle columns have a different length than the dataset");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(time[i] > 0.0) || !std::isfinite(time[i])) {
      throw DataError("row " + std::to_string(i) + ": observed time must be positive");
    }
    if (event[i] != 0 && event[i] != 1) {
      throw DataError("row " + std::to_string(i) + ": event indicator must be 0 or 1");
    }
    for (double x : features.Row(i)) {
      if (!std::isfinite(x)) {
        throw DataError("row " + std::to_string(i) + ": non-finite covariate value");
      }
    }
  }
}

SurvivalDataset SurvivalDataset::Subset(std::span<const std::size_t> rows) const {
  SurvivalDataset out;
  out.features = features.SelectRows(rows);
  out.feature_names = feature_names;
  out.time.reserve(rows.size());
  out.event.reserve(rows.size());
  for (std::size_t r : rows) {
    out.time.push_back(time[r]);
    out.event.push_back(event[r]);
  }
  const auto pick = [&](const std::optional<std::vector<double>>& column) {
    std::optional<std::vector<double>> result;
    if (column) {
      result.emplace();
      result->reserve(rows.size());
      for (std::size_t r : rows) result->push_back((*column)[r]);
    }
    return result;
  };
  out.true_event_time = pick(true_event_time);
  out.true_censor_time = pick(true_censor_time);
  return out;
}

std::optional<std::size_t> CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto fields = SplitLine(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(Location(path, line_number) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_number);
  }
  if (!have_header) throw DataError("'" + path.string() + "' is empty");
  return table;
}

double ParseDouble(const std::string& text, const std::filesystem::path& path, std::size_t line,
                   std::string_view column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw DataError(Location(path, line) + ": column '" + std::string(column) +
                    "' has non-numeric value '" + text + "'");
  }
  return value;
}

SurvivalDataset ReadDatasetCsv(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  const auto time_col = table.Column(kTimeColumn);
  const auto event_col = table.Column(kEventColumn);
  if (!time_col || !event_col) {
    throw DataError("'" + path.string() + "' must have 'time' and 'event' columns");
  }
  const auto true_event_col = table.Column(kTrueEventColumn);
  const auto true_censor_col = table.Column(kTrueCensorColumn);

  std::vector<std::size_t> feature_cols;
  SurvivalDataset data;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == *time_col || c == *event_col || c == true_event_col || c == true_censor_col) {
      continue;
    }
    feature_cols.push_back(c);
    data.feature_names.push_back(table.header[c]);
  }
  if (feature_cols.empty()) {
    throw DataError("'" + path.string() + "' has no feature columns");
  }

  const std::size_t n = table.rows.size();
  data.features = FeatureMatrix(n, feature_cols.size());
  data.time.resize(n);
  data.event.resize(n);
  if (true_event_col) data.true_event_time.emplace(n);
  if (true_censor_col) data.true_censor_time.emplace(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    data.time[i] = ParseDouble(row[*time_col], path, line, kTimeColumn);
    if (!(data.time[i] > 0.0) || !std::isfinite(data.time[i])) {
      throw DataError(Location(path, line) + ": time must be positive");
    }
    const double e = ParseDouble(row[*event_col], path, line, kEventColumn);
    if (e != 0.0 && e != 1.0) {
      throw DataError(Location(path, line) + ": event must be 0 or 1");
    }
    data.event[i] = static_cast<int>(e);
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const double x = ParseDouble(row[feature_cols[j]], path, line, table.header[feature_cols[j]]);
      if (!std::isfinite(x)) {
        throw DataError(Location(path, line) + ": non-finite value in column '" +
                        table.header[feature_cols[j]] + "'");
      }
      data.features(i, j) = x;
    }
    if (true_event_col) {
      (*data.true_event_time)[i] = ParseDouble(row[*true_event_col], path, line, kTrueEventColumn);
    }
    if (true_censor_col) {
      (*data.true_censor_time)[i] =
          ParseDouble(row[*true_censor_col], path, line, kTrueCensorColumn);
    }
  }
  return data;
}

void WriteDatasetCsv(const SurvivalDataset& data, const std::filesystem::path& path) {
  data.Validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << kTimeColumn << ',' << kEventColumn;
  for (std::size_t j = 0; j < data.features.cols(); ++j) {
    out << ',' << (data.feature_names.empty() ? "x" + std::to_string(j + 1) : data.feature_names[j]);
  }
  if (data.true_event_time) out << ',' << kTrueEventColumn;
  if (data.true_censor_time) out << ',' << kTrueCensorColumn;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << FormatDouble(data.time[i]) << ',' << data.event[i];
    for (double x : data.features.Row(i)) out << ',' << FormatDouble(x);
    if (data.true_event_time) out << ',' << FormatDouble((*data.true_event_time)[i]);
    if (data.true_censor_time) out << ',' << FormatDouble((*data.true_censor_time)[i]);
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

}  // namespace claytonboost
