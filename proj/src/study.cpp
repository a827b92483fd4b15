#include "claytonboost/study.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost {

using nlohmann::json;

std::vector<StudyPoint> DefaultStudyPoints(int study) {
  std::vector<StudyPoint> points;
  switch (study) {
    case 1:
      for (double theta : {1e-10, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
        points.push_back({"theta=" + FormatDouble(theta), {CopulaFamily::kClayton, theta}, 1.49});
      }
      break;
    case 2:
      for (double c : {0.89, 1.05, 1.2, 1.35, 1.49, 1.7, 2.06}) {
        points.push_back({"c=" + FormatDouble(c), {CopulaFamily::kClayton, 3.0}, c});
      }
      break;
    case 3:
      points.push_back({"clayton", {CopulaFamily::kClayton, 3.0}, 1.2});
      points.push_back({"gumbel", {CopulaFamily::kGumbel, 2.5}, 1.2});
      points.push_back({"frank", {CopulaFamily::kFrank, 7.5}, 1.2});
      points.push_back({"independent", {CopulaFamily::kIndependent, 0.0}, 1.2});
      break;
    default:
      throw ConfigError("study must be 1, 2 or 3, got " + std::to_string(study));
  }
  return points;
}

StudyConfig DefaultStudyConfig(int study) {
  StudyConfig config;
  config.study = study;
  config.points = DefaultStudyPoints(study);
  config.train.learning_rate = 0.1;
  config.train.max_depth = 6;
  config.train.lambda = 1.0;
  config.train.gamma = 0.0;
  config.train.min_child_weight = 1.0;
  config.cv.folds = 2;
  config.cv.checkpoint_stride = 50;
  config.cv.max_rounds = 500;
  return config;
}

void StudyConfig::Validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (n_train < 2 || n_test < 2) throw ConfigError("n_train and n_test must be at least 2");
  if (points.empty()) throw ConfigError("study grid is empty");
  if (n_horizons < 2) throw ConfigError("n_horizons must be at least 2");
  for (const StudyPoint& p : points) {
    if (p.label.empty() || p.label.find_first_of(",\"\n") != std::string::npos) {
      throw ConfigError("grid label '" + p.label + "' must be non-empty without commas or quotes");
    }
    p.copula.Validate();
    if (!(p.c > 0.0)) throw ConfigError("censoring constant c must be positive");
  }
  train.Validate();
  cv.Validate();
}

StudyConfig StudyConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("study config must be a JSON object");
  StudyConfig config;
  try {
    config = DefaultStudyConfig(j.value("study", 1));
    config.repetitions = j.value("repetitions", config.repetitions);
    config.n_train = j.value("n_train", config.n_train);
    config.n_test = j.value("n_test", config.n_test);
    config.seed = j.value("seed", config.seed);
    config.n_horizons = j.value("n_horizons", config.n_horizons);
    config.weibull_shape = j.value("weibull_shape", config.weibull_shape);
    config.weibull_scale = j.value("weibull_scale", config.weibull_scale);
    if (j.contains("train")) config.train = TrainConfigFromJson(j.at("train"), config.train);
    if (j.contains("cv")) config.cv = CvConfigFromJson(j.at("cv"), config.cv);
    const std::string link = j.value("censor_link", std::string(ToString(config.censor_link)));
    if (link != "exp" && link != "linear") throw ConfigError("censor_link must be exp or linear");
    config.censor_link = link == "exp" ? CensorLink::kExp : CensorLink::kLinear;
    const std::string induce = j.value("induce_on", std::string(ToString(config.induce_on)));
    if (induce != "survival" && induce != "distribution") {
      throw ConfigError("induce_on must be survival or distribution");
    }
    config.induce_on = induce == "survival" ? InduceOn::kSurvival : InduceOn::kDistribution;
    if (j.contains("grid")) {
      config.points.clear();
      for (const json& g : j.at("grid")) {
        StudyPoint p;
        p.copula.family = ParseCopulaFamily(g.value("copula", std::string("clayton")));
        p.copula.theta = g.value("theta", 0.0);
        p.c = g.at("c").get<double>();
        p.label = g.value("label", std::string(ToString(p.copula.family)) + "_" +
                                       FormatDouble(p.copula.theta) + "_c" + FormatDouble(p.c));
        config.points.push_back(std::move(p));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid study config: ") + e.what());
  }
  config.Validate();
  return config;
}

json StudyConfigToJson(const StudyConfig& config) {
  json grid = json::array();
  for (const StudyPoint& p : config.points) {
    grid.push_back({{"label", p.label},
                    {"copula", std::string(ToString(p.copula.family))},
                    {"theta", p.copula.theta},
                    {"c", p.c},
                    {"loss_theta", LossThetaFor(p.copula)}});
  }
  const double sigma = 1.0 / config.weibull_shape;
  return {{"study", config.study},
          {"repetitions", config.repetitions},
          {"n_train", config.n_train},
          {"n_test", config.n_test},
          {"seed", config.seed},
          {"n_horizons", config.n_horizons},
          {"weibull_shape", config.weibull_shape},
          {"weibull_scale", config.weibull_scale},
          {"censor_link", std::string(ToString(config.censor_link))},
          {"induce_on", std::string(ToString(config.induce_on))},
          {"event_baseline", {{"family", "extreme"}, {"sigma", sigma}}},
          {"censor_baseline", {{"family", "extreme"}, {"sigma", sigma}}},
          {"train", TrainConfigToJson(config.train)},
          {"cv", CvConfigToJson(config.cv)},
          {"grid", std::move(grid)}};
}

std::string_view ToString(StudyModel model) {
  return model == StudyModel::kClayton ? "clayton_boost" : "std_boost";
}

double LossThetaFor(const CopulaSpec& copula) {
  if (copula.family == CopulaFamily::kClayton) return copula.theta;
  const double tau = KendallTau(copula);
  if (tau <= 0.0) return 1e-10;
  return 2.0 * tau / (1.0 - tau);
}

namespace {

DgpConfig PointDgp(const StudyConfig& config, const StudyPoint& point, std::size_t n,
                   std::uint64_t seed) {
  DgpConfig dgp;
  dgp.n = n;
  dgp.c = point.c;
  dgp.copula = point.copula;
  dgp.weibull_shape = config.weibull_shape;
  dgp.weibull_scale = config.weibull_scale;
  dgp.seed = seed;
  dgp.censor_link = config.censor_link;
  dgp.induce_on = config.induce_on;
  return dgp;
}

json CurveToJson(const CalibrationCurve& c) {
  return {{"horizons", c.horizons},
          {"predicted", c.predicted_proportion},
          {"observed", c.observed_proportion},
          {"degenerate", c.degenerate}};
}

CalibrationCurve CurveFromJson(const json& j) {
  CalibrationCurve c;
  c.horizons = j.at("horizons").get<std::vector<double>>();
  c.predicted_proportion = j.at("predicted").get<std::vector<double>>();
  c.observed_proportion = j.at("observed").get<std::vector<double>>();
  c.degenerate = j.at("degenerate").get<bool>();
  return c;
}

json RecordToJson(const RunRecord& r) {
  return {{"point", r.point},
          {"repetition", r.repetition},
          {"model", std::string(ToString(r.model))},
          {"loss_theta", r.loss_theta},
          {"censoring_fraction", r.censoring_fraction},
          {"rounds", r.rounds},
          {"c_index", r.c_index},
          {"mae", r.mae},
          {"event_mae", r.event_mae},
          {"calibration", CurveToJson(r.calibration)}};
}

RunRecord RecordFromJson(const json& j) {
  RunRecord r;
  r.point = j.at("point").get<std::size_t>();
  r.repetition = j.at("repetition").get<int>();
  r.model = j.at("model").get<std::string>() == "clayton_boost" ? StudyModel::kClayton
                                                                 : StudyModel::kStandard;
  r.loss_theta = j.at("loss_theta").get<double>();
  r.censoring_fraction = j.at("censoring_fraction").get<double>();
  r.rounds = j.at("rounds").get<int>();
  r.c_index = j.at("c_index").get<double>();
  r.mae = j.at("mae").get<double>();
  r.event_mae = j.at("event_mae").get<double>();
  r.calibration = CurveFromJson(j.at("calibration"));
  return r;
}

std::filesystem::path PartialPath(const std::filesystem::path& dir, std::size_t point, int rep) {
  return dir / ("point" + std::to_string(point) + "_rep" + std::to_string(rep) + ".json");
}

// A fingerprint of everything that determines a repetition's outcome, so stale
// partial files from another configuration are never reused.
std::string Fingerprint(const StudyConfig& config, std::size_t point) {
  json j = StudyConfigToJson(config);
  j.erase("repetitions");
  j["grid"] = j["grid"][point];
  return j.dump();
}

}  // namespace

std::vector<RunRecord> RunRepetition(const StudyConfig& config, std::size_t point, int repetition) {
  const StudyPoint& p = config.points.at(point);
  // Every grid point of one repetition reuses the same streams, so curves over
  // the grid compare like with like.
  const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(repetition);
  const SimulatedDataset train = Generate(PointDgp(config, p, config.n_train, DeriveSeed(rep_seed, 0)));
  const SimulatedDataset test = Generate(PointDgp(config, p, config.n_test, DeriveSeed(rep_seed, 1)));

  const BaselineSpec baseline{BaselineFamily::kExtreme, 1.0 / config.weibull_shape};
  const double loss_theta = LossThetaFor(p.copula);
  CvConfig cv = config.cv;
  cv.thetas.clear();
  cv.seed = DeriveSeed(rep_seed, 2);

  std::vector<RunRecord> records;
  for (StudyModel model : {StudyModel::kClayton, StudyModel::kStandard}) {
    LossConfig loss;
    if (model == StudyModel::kClayton) {
      loss = ClaytonAftLoss{loss_theta, baseline, baseline};
    } else {
      loss = IndependentAftLoss{baseline};
    }
    const CvResult selected = CrossValidate(train.data, loss, config.train, cv);
    const std::vector<double> predicted = PredictTime(selected.model, test.data.features);
    const MetricsReport report =
        EvaluatePredictions(test.data.time, test.data.event, predicted,
                            std::span<const double>(*test.data.true_event_time), config.n_horizons);

    RunRecord r;
    r.point = point;
    r.repetition = repetition;
    r.model = model;
    r.loss_theta = model == StudyModel::kClayton ? loss_theta : 0.0;
    r.censoring_fraction = test.censoring_fraction;
    r.rounds = selected.points[selected.best].rounds;
    r.c_index = report.c_index;
    r.mae = report.mae.value();
    r.event_mae = report.event_mae.value_or(0.0);
    r.calibration = report.calibration;
    records.push_back(std::move(r));
  }
  return records;
}

const SummaryRow& StudyResult::Summary(std::size_t point, StudyModel model) const {
  for (const SummaryRow& row : summary) {
    if (row.point == point && row.model == model) return row;
  }
  throw ConfigError("no summary row for point " + std::to_string(point));
}

namespace {

std::vector<SummaryRow> Summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::size_t, int>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) groups[{r.point, static_cast<int>(r.model)}].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.point = key.first;
    row.model = static_cast<StudyModel>(key.second);
    const auto n = static_cast<double>(group.size());
    std::size_t n_horizons = group.front()->calibration.horizons.size();
    for (const RunRecord* r : group) n_horizons = std::min(n_horizons, r->calibration.horizons.size());
    row.calibration.horizons.assign(n_horizons, 0.0);
    row.calibration.predicted_proportion.assign(n_horizons, 0.0);
    row.calibration.observed_proportion.assign(n_horizons, 0.0);
    for (const RunRecord* r : group) {
      row.censoring_fraction += r->censoring_fraction / n;
      row.rounds += r->rounds / n;
      row.c_index += r->c_index / n;
      row.mae += r->mae / n;
      row.event_mae += r->event_mae / n;
      for (std::size_t h = 0; h < n_horizons; ++h) {
        row.calibration.horizons[h] += r->calibration.horizons[h] / n;
        row.calibration.predicted_proportion[h] += r->calibration.predicted_proportion[h] / n;
        row.calibration.observed_proportion[h] += r->calibration.observed_proportion[h] / n;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

StudyResult RunStudy(const StudyConfig& config, const std::filesystem::path& partial_dir,
                     bool verbose) {
  config.Validate();
  if (!partial_dir.empty()) std::filesystem::create_directories(partial_dir);

  const std::size_t n_points = config.points.size();
  const auto n_tasks = static_cast<std::int64_t>(n_points * static_cast<std::size_t>(config.repetitions));
  std::vector<std::vector<RunRecord>> per_task(static_cast<std::size_t>(n_tasks));
  std::exception_ptr failure;
  std::mutex mutex;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t task = 0; task < n_tasks; ++task) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (failure) continue;
    }
    const std::size_t point = static_cast<std::size_t>(task) % n_points;
    const int rep = static_cast<int>(static_cast<std::size_t>(task) / n_points);
    try {
      const std::string fingerprint = Fingerprint(config, point);
      std::vector<RunRecord> records;
      bool reused = false;
      const auto path = partial_dir.empty() ? std::filesystem::path{} : PartialPath(partial_dir, point, rep);
      if (!path.empty() && std::filesystem::exists(path)) {
        try {
          std::ifstream in(path);
          const json j = json::parse(in);
          if (j.at("fingerprint").get<std::string>() == fingerprint) {
            for (const json& r : j.at("records")) records.push_back(RecordFromJson(r));
            reused = true;
          }
        } catch (const json::exception&) {
          records.clear();  // unreadable partial file: recompute
        }
      }
      if (!reused) {
        records = RunRepetition(config, point, rep);
        if (!path.empty()) {
          json j = {{"fingerprint", fingerprint}, {"records", json::array()}};
          for (const RunRecord& r : records) j["records"].push_back(RecordToJson(r));
          const auto tmp = std::filesystem::path(path.string() + ".tmp");
          {
            std::ofstream out(tmp);
            out << j.dump() << '\n';
          }
          std::filesystem::rename(tmp, path);
        }
      }
      if (verbose) {
        std::lock_guard<std::mutex> lock(mutex);
        std::cerr << "study " << config.study << " " << config.points[point].label << " rep "
                  << rep << (reused ? " (reused)" : "") << '\n';
      }
      per_task[static_cast<std::size_t>(task)] = std::move(records);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  StudyResult result;
  result.config = config;
  for (auto& records : per_task) {
    for (RunRecord& r : records) result.records.push_back(std::move(r));
  }
  std::sort(result.records.begin(), result.records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.point, a.repetition, a.model) < std::tie(b.point, b.repetition, b.model);
  });
  result.summary = Summarize(result.records);
  return result;
}

void WriteStudyOutputs(const StudyResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  const auto& points = result.config.points;
  const auto point_columns = [&](std::size_t p) {
    return std::to_string(p) + ',' + points[p].label + ',' +
           std::string(ToString(points[p].copula.family)) + ',' +
           FormatDouble(points[p].copula.theta) + ',' + FormatDouble(points[p].c);
  };

  {
    auto out = open("results.csv");
    out << "point,label,copula,theta,c,repetition,model,loss_theta,censoring_fraction,rounds,"
           "c_index,mae,event_mae,calibration_mad\n";
    for (const RunRecord& r : result.records) {
      out << point_columns(r.point) << ',' << r.repetition << ',' << ToString(r.model) << ','
          << FormatDouble(r.loss_theta) << ',' << FormatDouble(r.censoring_fraction) << ','
          << r.rounds << ',' << FormatDouble(r.c_index) << ',' << FormatDouble(r.mae) << ','
          << FormatDouble(r.event_mae) << ',' << FormatDouble(r.calibration.MeanAbsoluteDeviation())
          << '\n';
    }
  }
  {
    auto out = open("summary.csv");
    out << "point,label,copula,theta,c,model,censoring_fraction,rounds,c_index,mae,event_mae,"
           "calibration_mad\n";
    for (const SummaryRow& s : result.summary) {
      out << point_columns(s.point) << ',' << ToString(s.model) << ','
          << FormatDouble(s.censoring_fraction) << ',' << FormatDouble(s.rounds) << ','
          << FormatDouble(s.c_index) << ',' << FormatDouble(s.mae) << ','
          << FormatDouble(s.event_mae) << ',' << FormatDouble(s.calibration.MeanAbsoluteDeviation())
          << '\n';
    }
  }
  {
    auto out = open("calibration.csv");
    out << "point,label,copula,theta,c,model,horizon_index,horizon,predicted_proportion,"
           "observed_proportion\n";
    for (const SummaryRow& s : result.summary) {
      for (std::size_t h = 0; h < s.calibration.horizons.size(); ++h) {
        out << point_columns(s.point) << ',' << ToString(s.model) << ',' << h + 1 << ','
            << FormatDouble(s.calibration.horizons[h]) << ','
            << FormatDouble(s.calibration.predicted_proportion[h]) << ','
            << FormatDouble(s.calibration.observed_proportion[h]) << '\n';
      }
    }
  }
  auto out = open("config.json");
  out << StudyConfigToJson(result.config).dump(2) << '\n';
}

}  // namespace claytonboost
