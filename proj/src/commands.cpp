#include "claytonboost/commands.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "claytonboost/booster.hpp"
#include "claytonboost/cv.hpp"
#include "claytonboost/error.hpp"
#include "claytonboost/metrics.hpp"
#include "claytonboost/simulate.hpp"
#include "claytonboost/study.hpp"

namespace claytonboost {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 0;
  bool quiet = false;
};

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

json LoadConfig(const GlobalOptions& g) {
  if (g.config.empty()) return json::object();
  json j = ReadJsonFile(g.config);
  if (!j.is_object()) throw ConfigError("config file '" + g.config + "' must hold a JSON object");
  return j;
}

fs::path OutputDir(const GlobalOptions& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

BaselineSpec BaselineConfig(const json& j, const char* key) {
  BaselineSpec b;
  if (!j.contains(key)) return b;
  const json& bj = j.at(key);
  b.family = ParseBaselineFamily(bj.value("family", std::string("extreme")));
  b.sigma = bj.value("sigma", 1.0);
  b.Validate();
  return b;
}

// {"loss": "clayton"|"independent", "theta", "event_baseline", "censor_baseline"}.
// Missing pieces of a clayton loss are taken from simulation metadata when given.
LossConfig LossConfigFromJson(const json& config, const std::optional<json>& metadata) {
  json j = config.contains("loss") && config.at("loss").is_object() ? config.at("loss") : config;
  if (metadata) {
    const json& implied = metadata->at("implied_loss");
    for (const char* key : {"loss", "theta", "event_baseline", "censor_baseline"}) {
      if (!j.contains(key) && implied.contains(key)) j[key] = implied.at(key);
    }
  }
  try {
    const std::string tag = j.value("loss", std::string("clayton"));
    if (tag == "clayton") {
      if (!j.contains("theta")) {
        throw ConfigError("clayton loss needs 'theta' (or --metadata from a clayton simulation)");
      }
      ClaytonAftLoss loss;
      loss.theta = j.at("theta").get<double>();
      loss.event_baseline = BaselineConfig(j, "event_baseline");
      loss.censor_baseline = BaselineConfig(j, "censor_baseline");
      loss.Validate();
      return loss;
    }
    if (tag == "independent") {
      IndependentAftLoss loss;
      loss.event_baseline = BaselineConfig(j, "event_baseline");
      loss.Validate();
      return loss;
    }
    throw ConfigError("unknown loss '" + tag + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid loss config: ") + e.what());
  }
}

TrainConfig TrainSection(const json& config) {
  return config.contains("train") ? TrainConfigFromJson(config.at("train")) : TrainConfig{};
}

struct FeatureTable {
  FeatureMatrix features;
  std::optional<std::vector<double>> time;
  std::optional<std::vector<int>> event;
};

// Every column except time, event and the oracle columns is a feature.
FeatureTable ReadFeatureCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name != kTimeColumn && name != kEventColumn && name != kTrueEventColumn &&
        name != kTrueCensorColumn) {
      cols.push_back(c);
    }
  }
  if (cols.empty()) throw DataError("'" + path.string() + "' has no feature columns");
  FeatureTable out;
  out.features = FeatureMatrix(table.rows.size(), cols.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::string& field = table.rows[i][cols[j]];
      if (field.empty()) {
        throw DataError("'" + path.string() + "' line " + std::to_string(table.line_numbers[i]) +
                        ": empty value in column '" + table.header[cols[j]] + "'");
      }
      const double x = ParseDouble(field, path, table.line_numbers[i], table.header[cols[j]]);
      if (!std::isfinite(x)) {
        throw DataError("'" + path.string() + "' line " + std::to_string(table.line_numbers[i]) +
                        ": non-finite value in column '" + table.header[cols[j]] + "'");
      }
      out.features(i, j) = x;
    }
  }
  if (table.Column(kTimeColumn) && table.Column(kEventColumn)) {
    const SurvivalDataset d = ReadDatasetCsv(path);
    out.time = d.time;
    out.event = d.event;
  }
  return out;
}

void WritePredictions(const std::vector<double>& log_time, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "predicted_log_time,predicted_time\n";
  for (double y : log_time) out << FormatDouble(y) << ',' << FormatDouble(std::exp(y)) << '\n';
}

std::vector<double> ReadPredictedTimes(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const auto col = table.Column("predicted_time");
  if (!col) throw DataError("'" + path.string() + "' has no 'predicted_time' column");
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out.push_back(ParseDouble(table.rows[i][*col], path, table.line_numbers[i], "predicted_time"));
  }
  return out;
}

int CmdSimulate(const GlobalOptions& g, std::ostream& out) {
  json j = LoadConfig(g);
  if (g.seed) j["seed"] = *g.seed;
  const DgpConfig config = DgpFromJson(j);
  const fs::path dir = OutputDir(g);
  const SimulatedDataset sim = Generate(config);
  WriteDatasetCsv(sim.data, dir / "dataset.csv");
  WriteMetadata(sim, dir / "metadata.json");
  if (!g.quiet) {
    out << "rows " << sim.data.size() << ", events " << sim.data.EventCount()
        << ", censoring fraction " << sim.censoring_fraction << '\n';
  }
  return 0;
}

int CmdTrain(const GlobalOptions& g, const std::string& data_path, const std::string& metadata_path,
             std::ostream& out) {
  const json config = LoadConfig(g);
  std::optional<json> metadata;
  if (!metadata_path.empty()) metadata = ReadJsonFile(metadata_path);
  const LossConfig loss = LossConfigFromJson(config, metadata);
  TrainConfig train = TrainSection(config);
  if (g.seed) train.seed = *g.seed;
  const SurvivalDataset data = ReadDatasetCsv(data_path);
  const fs::path dir = OutputDir(g);
  const TreeEnsemble model = Train(data, loss, train);
  SaveModel(model, dir / "model.json");
  if (!g.quiet) {
    const auto pred = Predict(model, data.features);
    out << "rounds " << model.trees.size() << ", final training loss "
        << FormatDouble(kernels::MeanLoss(loss, data.time, data.event, pred)) << '\n';
  }
  return 0;
}

int CmdPredict(const GlobalOptions& g, const std::string& model_path, const std::string& data_path,
               std::ostream& out) {
  const TreeEnsemble model = LoadModel(model_path);
  const FeatureTable table = ReadFeatureCsv(data_path);
  if (table.features.rows() == 0) throw DataError("'" + data_path + "' has no rows");
  const fs::path dir = OutputDir(g);
  const auto pred = Predict(model, table.features);
  WritePredictions(pred, dir / "predictions.csv");
  if (!g.quiet) {
    out << "rows " << pred.size();
    if (table.time) {
      out << ", mean loss " << FormatDouble(kernels::MeanLoss(model.loss, *table.time, *table.event, pred));
    }
    out << '\n';
  }
  return 0;
}

int CmdEvaluate(const GlobalOptions& g, const std::string& predictions_path,
                const std::string& data_path, int n_horizons, std::ostream& out) {
  const std::vector<double> predicted = ReadPredictedTimes(predictions_path);
  const SurvivalDataset data = ReadDatasetCsv(data_path);
  if (predicted.size() != data.size()) {
    throw ShapeError("predictions have " + std::to_string(predicted.size()) + " rows, data has " +
                     std::to_string(data.size()));
  }
  std::optional<std::span<const double>> oracle;
  if (data.true_event_time) oracle = std::span<const double>(*data.true_event_time);
  const MetricsReport report = EvaluatePredictions(data.time, data.event, predicted, oracle, n_horizons);
  const fs::path dir = OutputDir(g);
  std::ofstream json_out(dir / "metrics.json");
  if (!json_out) throw DataError("cannot write metrics.json");
  json_out << ReportToJson(report).dump(2) << '\n';
  WriteCalibrationCsv(report.calibration, dir / "calibration.csv");
  if (!g.quiet) {
    out << "c-index " << FormatDouble(report.c_index);
    if (report.mae) out << ", mae " << FormatDouble(*report.mae);
    if (report.event_mae) out << ", event mae " << FormatDouble(*report.event_mae);
    out << '\n';
  }
  return 0;
}

int CmdCv(const GlobalOptions& g, const std::string& data_path, const std::string& metadata_path,
          std::ostream& out) {
  const json config = LoadConfig(g);
  std::optional<json> metadata;
  if (!metadata_path.empty()) metadata = ReadJsonFile(metadata_path);
  json loss_json = config;
  // A theta grid supplies theta, so a clayton loss may omit it.
  if (config.contains("cv") && config.at("cv").contains("thetas")) {
    json& target = loss_json.contains("loss") && loss_json["loss"].is_object() ? loss_json["loss"] : loss_json;
    if (!target.contains("theta") && !(metadata && metadata->at("implied_loss").contains("theta"))) {
      const auto& grid = config.at("cv").at("thetas");
      if (grid.is_array() && !grid.empty()) target["theta"] = grid.front();
    }
  }
  const LossConfig loss = LossConfigFromJson(loss_json, metadata);
  const TrainConfig train = TrainSection(config);
  CvConfig cv = config.contains("cv") ? CvConfigFromJson(config.at("cv")) : CvConfig{};
  if (g.seed) cv.seed = *g.seed;
  const SurvivalDataset data = ReadDatasetCsv(data_path);
  const fs::path dir = OutputDir(g);
  const CvResult result = CrossValidate(data, loss, train, cv);
  std::ofstream json_out(dir / "cv.json");
  if (!json_out) throw DataError("cannot write cv.json");
  json_out << CvResultToJson(result).dump(2) << '\n';
  SaveModel(result.model, dir / "model.json");
  if (!g.quiet) {
    const CvPoint& best = result.points[result.best];
    out << "best rounds " << best.rounds;
    if (best.theta) out << ", theta " << FormatDouble(*best.theta);
    out << ", mean c-index " << FormatDouble(best.mean_score) << '\n';
  }
  return 0;
}

int CmdStudy(const GlobalOptions& g, int study, int repetitions, std::ostream& out,
             std::ostream& err) {
  json j = LoadConfig(g);
  if (study > 0) j["study"] = study;
  if (repetitions > 0) j["repetitions"] = repetitions;
  if (g.seed) j["seed"] = *g.seed;
  const StudyConfig config = StudyConfigFromJson(j);
  const fs::path dir = OutputDir(g);
  const auto start = std::chrono::steady_clock::now();
  const StudyResult result = RunStudy(config, dir / "partial", !g.quiet);
  WriteStudyOutputs(result, dir);
  if (!g.quiet) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const SummaryRow& s : result.summary) {
      out << config.points[s.point].label << ' ' << ToString(s.model) << ": mae "
          << FormatDouble(s.mae) << ", c-index " << FormatDouble(s.c_index) << ", censoring "
          << FormatDouble(s.censoring_fraction) << '\n';
    }
    err << "study finished in " << seconds << " s\n";
  }
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-boosted survival regression under dependent censoring"};
  app.fallthrough();
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--seed", g.seed, "Override the seed of the config");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  auto* simulate = app.add_subcommand("simulate", "Simulate a dependently censored dataset");

  std::string data, metadata, model, predictions;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--data", data, "Training CSV")->required();
  train->add_option("--metadata", metadata, "Simulation metadata supplying the loss");

  auto* predict = app.add_subcommand("predict", "Predict log event times");
  predict->add_option("--model", model, "Model JSON")->required();
  predict->add_option("--data", data, "Feature CSV")->required();

  int n_horizons = 9;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against data");
  evaluate->add_option("--predictions", predictions, "Predictions CSV")->required();
  evaluate->add_option("--data", data, "Dataset CSV")->required();
  evaluate->add_option("--horizons", n_horizons, "Calibration horizons")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();

  auto* cv = app.add_subcommand("cv", "Cross-validated grid search and refit");
  cv->add_option("--data", data, "Training CSV")->required();
  cv->add_option("--metadata", metadata, "Simulation metadata supplying the loss");

  int study_id = 0, repetitions = 0;
  auto* study = app.add_subcommand("study", "Run a simulation study");
  study->add_option("--study", study_id, "Study 1, 2 or 3 (overrides the config)")
      ->check(CLI::Range(1, 3));
  study->add_option("--repetitions", repetitions, "Repetitions (overrides the config)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (g.threads > 0) omp_set_num_threads(g.threads);
    if (simulate->parsed()) return CmdSimulate(g, out);
    if (train->parsed()) return CmdTrain(g, data, metadata, out);
    if (predict->parsed()) return CmdPredict(g, model, data, out);
    if (evaluate->parsed()) return CmdEvaluate(g, predictions, data, n_horizons, out);
    if (cv->parsed()) return CmdCv(g, data, metadata, out);
    if (study->parsed()) return CmdStudy(g, study_id, repetitions, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.ExitCode();
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 2;
}

}  // namespace claytonboost
