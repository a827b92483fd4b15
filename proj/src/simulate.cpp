#include "claytonboost/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost {

using nlohmann::json;

void DgpConfig::Validate() const {
  if (n < 2) throw ConfigError("simulation needs n >= 2");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("censoring constant c must be positive");
  if (!(weibull_shape > 0.0) || !std::isfinite(weibull_shape)) {
    throw ConfigError("weibull_shape must be positive");
  }
  if (!(weibull_scale > 0.0) || !std::isfinite(weibull_scale)) {
    throw ConfigError("weibull_scale must be positive");
  }
  if (n_features < 8) throw ConfigError("the event-time function needs at least 8 features");
  copula.Validate();
}

std::string_view ToString(CensorLink link) { return link == CensorLink::kExp ? "exp" : "linear"; }

std::string_view ToString(InduceOn orientation) {
  return orientation == InduceOn::kSurvival ? "survival" : "distribution";
}

json DgpToJson(const DgpConfig& config) {
  return {{"n", config.n},
          {"c", config.c},
          {"copula", std::string(ToString(config.copula.family))},
          {"theta", config.copula.theta},
          {"weibull_shape", config.weibull_shape},
          {"weibull_scale", config.weibull_scale},
          {"n_features", config.n_features},
          {"seed", config.seed},
          {"censor_link", std::string(ToString(config.censor_link))},
          {"induce_on", std::string(ToString(config.induce_on))}};
}

DgpConfig DgpFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  DgpConfig config;
  try {
    if (j.contains("n")) {
      const auto n = j.at("n").get<long long>();
      if (n < 2) throw ConfigError("simulation needs n >= 2, got " + std::to_string(n));
      config.n = static_cast<std::size_t>(n);
    }
    config.c = j.value("c", config.c);
    if (j.contains("copula")) {
      config.copula.family = ParseCopulaFamily(j.at("copula").get<std::string>());
    }
    config.copula.theta = j.value("theta", config.copula.theta);
    config.weibull_shape = j.value("weibull_shape", config.weibull_shape);
    config.weibull_scale = j.value("weibull_scale", config.weibull_scale);
    config.n_features = j.value("n_features", config.n_features);
    config.seed = j.value("seed", config.seed);
    const std::string link = j.value("censor_link", std::string("exp"));
    if (link == "exp") {
      config.censor_link = CensorLink::kExp;
    } else if (link == "linear") {
      config.censor_link = CensorLink::kLinear;
    } else {
      throw ConfigError("censor_link must be 'exp' or 'linear', got '" + link + "'");
    }
    const std::string induce = j.value("induce_on", std::string("survival"));
    if (induce == "survival") {
      config.induce_on = InduceOn::kSurvival;
    } else if (induce == "distribution") {
      config.induce_on = InduceOn::kDistribution;
    } else {
      throw ConfigError("induce_on must be 'survival' or 'distribution', got '" + induce + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid simulation config: ") + e.what());
  }
  config.Validate();
  return config;
}

double HFunction(std::span<const double> x) {
  if (x.size() < 8) throw ShapeError("event-time function needs 8 covariates");
  return x[0] * x[1] + 0.5 * x[2] * x[2] * x[2] + x[3] * x[4] + 0.8 * std::exp(-x[5]) +
         x[6] * std::sin(2.0 * x[7]);
}

Margins DrawMargins(const DgpConfig& config, Rng& rng) {
  config.Validate();
  const std::size_t n = config.n;
  Margins m;
  m.features = FeatureMatrix(n, config.n_features);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < config.n_features; ++j) m.features(i, j) = rng.Uniform();
  }
  m.event_time.resize(n);
  m.censor_time.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.event_time[i] =
        std::exp(HFunction(m.features.Row(i))) * rng.Weibull(config.weibull_scale, config.weibull_shape);
  }
  const double factor = config.censor_link == CensorLink::kExp ? std::exp(config.c) : config.c;
  for (std::size_t i = 0; i < n; ++i) {
    m.censor_time[i] = factor * rng.Weibull(config.weibull_scale, config.weibull_shape);
  }
  return m;
}

namespace {

std::vector<std::size_t> Ranks(std::span<const double> w) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  std::vector<std::size_t> rank(w.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<std::size_t> AscendingOrder(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

}  // namespace

Margins InduceRankCorrelation(const Margins& margins, const CopulaSpec& copula, InduceOn orientation,
                              Rng& rng) {
  const std::size_t n = margins.event_time.size();
  if (margins.censor_time.size() != n || margins.features.rows() != n) {
    throw ShapeError("event times, censoring times and covariates differ in length");
  }
  if (n < 2) throw ShapeError("rank induction needs at least two rows");
  copula.Validate();

  std::vector<double> w1(n), w2(n);
  for (std::size_t i = 0; i < n; ++i) std::tie(w1[i], w2[i]) = SamplePair(copula, rng);
  const auto rank1 = Ranks(w1);
  const auto rank2 = Ranks(w2);
  const auto t_order = AscendingOrder(margins.event_time);
  const auto u_order = AscendingOrder(margins.censor_time);

  const auto position = [&](std::size_t rank) {
    return orientation == InduceOn::kSurvival ? n - 1 - rank : rank;
  };

  Margins out;
  out.event_time.resize(n);
  out.censor_time.resize(n);
  out.features = FeatureMatrix(n, margins.features.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = t_order[position(rank1[i])];
    out.event_time[i] = margins.event_time[src];
    std::copy_n(margins.features.Row(src).begin(), margins.features.cols(),
                out.features.Row(i).begin());
    out.censor_time[i] = margins.censor_time[u_order[position(rank2[i])]];
  }
  return out;
}

SimulatedDataset Generate(const DgpConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  const Margins raw = DrawMargins(config, rng);
  Margins m = InduceRankCorrelation(raw, config.copula, config.induce_on, rng);

  SimulatedDataset sim;
  sim.config = config;
  SurvivalDataset& d = sim.data;
  const std::size_t n = config.n;
  d.features = std::move(m.features);
  for (std::size_t j = 0; j < d.features.cols(); ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
  d.time.resize(n);
  d.event.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.event[i] = m.event_time[i] <= m.censor_time[i] ? 1 : 0;
    d.time[i] = d.event[i] ? m.event_time[i] : m.censor_time[i];
  }
  d.true_event_time = std::move(m.event_time);
  d.true_censor_time = std::move(m.censor_time);
  sim.censoring_fraction = d.CensoringFraction();

  const BaselineSpec baseline{BaselineFamily::kExtreme, 1.0 / config.weibull_shape};
  sim.implied_loss.theta =
      config.copula.family == CopulaFamily::kClayton ? config.copula.theta : 0.0;
  sim.implied_loss.event_baseline = baseline;
  sim.implied_loss.censor_baseline = baseline;
  return sim;
}

json MetadataToJson(const SimulatedDataset& sim) {
  json loss = {{"event_baseline",
                {{"family", std::string(ToString(sim.implied_loss.event_baseline.family))},
                 {"sigma", sim.implied_loss.event_baseline.sigma}}},
               {"censor_baseline",
                {{"family", std::string(ToString(sim.implied_loss.censor_baseline.family))},
                 {"sigma", sim.implied_loss.censor_baseline.sigma}}}};
  // Only a Clayton DGP has a matching loss dependency parameter.
  if (sim.config.copula.family == CopulaFamily::kClayton) {
    loss["loss"] = "clayton";
    loss["theta"] = sim.implied_loss.theta;
  }
  return {{"config", DgpToJson(sim.config)},
          {"n_rows", sim.data.size()},
          {"n_events", sim.data.EventCount()},
          {"censoring_fraction", sim.censoring_fraction},
          {"kendall_tau", KendallTau(sim.config.copula)},
          {"implied_loss", std::move(loss)}};
}

void WriteMetadata(const SimulatedDataset& sim, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metadata file '" + path.string() + "'");
  out << MetadataToJson(sim).dump(2) << '\n';
}

}  // namespace claytonboost
