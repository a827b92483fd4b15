#include "claytonboost/booster.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost {

using nlohmann::json;

int RegressionTree::LeafIndex(std::span<const double> row) const {
  int index = 0;
  while (!nodes_[index].IsLeaf()) {
    const TreeNode& node = nodes_[index];
    index = row[static_cast<std::size_t>(node.split_feature)] < node.threshold ? node.left
                                                                               : node.right;
  }
  return index;
}

double RegressionTree::Predict(std::span<const double> row) const {
  return nodes_[LeafIndex(row)].weight;
}

int RegressionTree::Depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  // Children always follow their parent in storage order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].IsLeaf()) continue;
    depth[nodes_[i].left] = depth[i] + 1;
    depth[nodes_[i].right] = depth[i] + 1;
    deepest = std::max(deepest, depth[i] + 1);
  }
  return deepest;
}

int RegressionTree::LeafCount() const {
  int leaves = 0;
  for (const TreeNode& node : nodes_) leaves += node.IsLeaf();
  return leaves;
}

double TreeEnsemble::PredictRow(std::span<const double> row, std::size_t n_trees) const {
  const std::size_t count = std::min(n_trees, trees.size());
  double y = base_score;
  for (std::size_t k = 0; k < count; ++k) y += learning_rate * trees[k].Predict(row);
  return y;
}

void TrainConfig::Validate() const {
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (!(min_child_weight >= 0.0)) throw ConfigError("min_child_weight must be non-negative");
  if (base_score && !std::isfinite(*base_score)) throw ConfigError("base_score must be finite");
}

TreeEnsemble TrainWithGradients(const FeatureMatrix& features, double base_score,
                                const GradientFunction& gradients, const TrainConfig& config,
                                const LossConfig& loss, const RoundCallback& on_round) {
  config.Validate();
  if (features.cols() == 0) throw ConfigError("training requires at least one feature");
  if (features.rows() == 0) throw DataError("training requires at least one row");

  TreeEnsemble model;
  model.base_score = base_score;
  model.learning_rate = config.learning_rate;
  model.n_features = features.cols();
  model.loss = loss;
  model.trees.reserve(static_cast<std::size_t>(config.rounds));

  const auto sorted = kernels::SortedColumns::Build(features);
  const std::size_t n = features.rows();
  std::vector<double> predictions(n, base_score);
  std::vector<GradientPair> gp(n);

  for (int round = 1; round <= config.rounds; ++round) {
    gradients(predictions, gp);
    RegressionTree tree = GrowTree(features, sorted, gp, config);
    for (std::size_t i = 0; i < n; ++i) {
      predictions[i] += config.learning_rate * tree.Predict(features.Row(i));
    }
    model.trees.push_back(std::move(tree));
    if (on_round) on_round(round, predictions);
  }
  return model;
}

TreeEnsemble Train(const SurvivalDataset& data, const LossConfig& loss, const TrainConfig& config,
                   const RoundCallback& on_round) {
  Validate(loss);
  config.Validate();
  data.Validate();
  if (data.size() == 0) throw DataError("training requires at least one row");

  double base_score = 0.0;
  if (config.base_score) {
    base_score = *config.base_score;
  } else {
    for (double t : data.time) base_score += std::log(t);
    base_score /= static_cast<double>(data.size());
  }

  int round = 0;
  const GradientFunction gradients = [&](std::span<const double> predictions,
                                         std::span<GradientPair> out) {
    ++round;
    try {
      kernels::ComputeGradients(loss, data.time, data.event, predictions, out);
    } catch (const NumericError& e) {
      throw NumericError("training aborted in round " + std::to_string(round) + ": " + e.what());
    }
  };
  return TrainWithGradients(data.features, base_score, gradients, config, loss, on_round);
}

std::vector<double> Predict(const TreeEnsemble& model, const FeatureMatrix& features) {
  if (features.cols() != model.n_features) {
    throw ShapeError("model expects " + std::to_string(model.n_features) + " features, got " +
                     std::to_string(features.cols()));
  }
  std::vector<double> out(features.rows());
  kernels::Predict(model, features, out);
  return out;
}

std::vector<double> PredictTime(const TreeEnsemble& model, const FeatureMatrix& features) {
  std::vector<double> out = Predict(model, features);
  for (double& y : out) y = std::exp(y);
  return out;
}

namespace {

json BaselineToJson(const BaselineSpec& b) {
  return {{"family", std::string(ToString(b.family))}, {"sigma", b.sigma}};
}

template <typename T>
T Field(const json& j, const char* key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) {
    throw PersistenceError("missing field '" + context + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw PersistenceError("field '" + context + key + "' has the wrong type");
  }
}

BaselineSpec BaselineFromJson(const json& j, const std::string& context) {
  BaselineSpec b;
  try {
    b.family = ParseBaselineFamily(Field<std::string>(j, "family", context));
  } catch (const ConfigError& e) {
    throw PersistenceError("field '" + context + "family': " + e.what());
  }
  b.sigma = Field<double>(j, "sigma", context);
  return b;
}

RegressionTree TreeFromJson(const json& j, std::size_t n_features, const std::string& context) {
  const json nodes_json = Field<json>(j, "nodes", context);
  if (!nodes_json.is_array() || nodes_json.empty()) {
    throw PersistenceError("field '" + context + "nodes' must be a non-empty array");
  }
  std::vector<TreeNode> nodes(nodes_json.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& nj = nodes_json[i];
    const std::string where = context + "nodes[" + std::to_string(i) + "].";
    TreeNode& node = nodes[i];
    if (nj.contains("leaf")) {
      node.weight = Field<double>(nj, "leaf", where);
      node.sum_hess = nj.value("cover", 0.0);
      continue;
    }
    node.split_feature = Field<int>(nj, "split_feature", where);
    node.threshold = Field<double>(nj, "threshold", where);
    node.left = Field<int>(nj, "left", where);
    node.right = Field<int>(nj, "right", where);
    const auto direction = Field<std::string>(nj, "default_direction", where);
    if (direction != "left" && direction != "right") {
      throw PersistenceError("field '" + where + "default_direction' must be left or right");
    }
    node.default_left = direction == "left";
    node.gain = nj.value("gain", 0.0);
    node.sum_hess = nj.value("cover", 0.0);
    const auto in_range = [&](int child) {
      return child > static_cast<int>(i) && child < static_cast<int>(nodes.size());
    };
    if (!in_range(node.left) || !in_range(node.right) || node.left == node.right) {
      throw PersistenceError("field '" + where + "left/right' points outside the tree");
    }
    if (node.split_feature < 0 || static_cast<std::size_t>(node.split_feature) >= n_features) {
      throw PersistenceError("field '" + where + "split_feature' is out of range");
    }
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace

json LossToJson(const LossConfig& loss) {
  return std::visit(
      [](const auto& l) -> json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ClaytonAftLoss>) {
          return {{"loss", "clayton"},
                  {"theta", l.theta},
                  {"event_baseline", BaselineToJson(l.event_baseline)},
                  {"censor_baseline", BaselineToJson(l.censor_baseline)}};
        } else {
          return {{"loss", "independent"}, {"event_baseline", BaselineToJson(l.event_baseline)}};
        }
      },
      loss);
}

LossConfig LossFromJson(const json& j) {
  const auto tag = Field<std::string>(j, "loss", "loss.");
  if (tag == "clayton") {
    ClaytonAftLoss l;
    l.theta = Field<double>(j, "theta", "loss.");
    l.event_baseline = BaselineFromJson(Field<json>(j, "event_baseline", "loss."),
                                        "loss.event_baseline.");
    l.censor_baseline = BaselineFromJson(Field<json>(j, "censor_baseline", "loss."),
                                         "loss.censor_baseline.");
    return l;
  }
  if (tag == "independent") {
    IndependentAftLoss l;
    l.event_baseline = BaselineFromJson(Field<json>(j, "event_baseline", "loss."),
                                        "loss.event_baseline.");
    return l;
  }
  throw PersistenceError("unknown loss '" + tag + "'");
}

json ModelToJson(const TreeEnsemble& model) {
  json trees = json::array();
  for (const RegressionTree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes()) {
      if (node.IsLeaf()) {
        nodes.push_back({{"leaf", node.weight}, {"cover", node.sum_hess}});
      } else {
        nodes.push_back({{"split_feature", node.split_feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right},
                         {"default_direction", node.default_left ? "left" : "right"},
                         {"gain", node.gain},
                         {"cover", node.sum_hess}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"format_version", kModelFormatVersion},
          {"base_score", model.base_score},
          {"learning_rate", model.learning_rate},
          {"n_features", model.n_features},
          {"loss", LossToJson(model.loss)},
          {"trees", std::move(trees)}};
}

TreeEnsemble ModelFromJson(const json& j) {
  const int version = Field<int>(j, "format_version", "");
  if (version != kModelFormatVersion) {
    throw PersistenceError("unsupported format_version " + std::to_string(version));
  }
  TreeEnsemble model;
  model.base_score = Field<double>(j, "base_score", "");
  model.learning_rate = Field<double>(j, "learning_rate", "");
  model.n_features = Field<std::size_t>(j, "n_features", "");
  model.loss = LossFromJson(Field<json>(j, "loss", ""));
  const json trees = Field<json>(j, "trees", "");
  if (!trees.is_array()) throw PersistenceError("field 'trees' must be an array");
  for (std::size_t k = 0; k < trees.size(); ++k) {
    model.trees.push_back(
        TreeFromJson(trees[k], model.n_features, "trees[" + std::to_string(k) + "]."));
  }
  return model;
}

void SaveModel(const TreeEnsemble& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PersistenceError("cannot write model file '" + path.string() + "'");
  out << ModelToJson(model).dump(1) << '\n';
  if (!out) throw PersistenceError("failed writing model file '" + path.string() + "'");
}

TreeEnsemble LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open model file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw PersistenceError("parse error in model file '" + path.string() + "': " + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace claytonboost

namespace claytonboost {

TrainConfig TrainConfigFromJson(const json& j, TrainConfig base) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  try {
    base.rounds = j.value("rounds", base.rounds);
    base.learning_rate = j.value("learning_rate", base.learning_rate);
    base.max_depth = j.value("max_depth", base.max_depth);
    base.lambda = j.value("lambda", base.lambda);
    base.gamma = j.value("gamma", base.gamma);
    base.min_child_weight = j.value("min_child_weight", base.min_child_weight);
    base.seed = j.value("seed", base.seed);
    if (j.contains("base_score")) {
      const json& b = j.at("base_score");
      if (b.is_string()) {
        if (b.get<std::string>() != "auto") throw ConfigError("base_score must be a number or \"auto\"");
        base.base_score.reset();
      } else {
        base.base_score = b.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid training config: ") + e.what());
  }
  base.Validate();
  return base;
}

json TrainConfigToJson(const TrainConfig& config) {
  json j = {{"rounds", config.rounds},
            {"learning_rate", config.learning_rate},
            {"max_depth", config.max_depth},
            {"lambda", config.lambda},
            {"gamma", config.gamma},
            {"min_child_weight", config.min_child_weight},
            {"seed", config.seed}};
  if (config.base_score) {
    j["base_score"] = *config.base_score;
  } else {
    j["base_score"] = "auto";
  }
  return j;
}

}  // namespace claytonboost
