#include "claytonboost/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "claytonboost/error.hpp"

namespace claytonboost::kernels {
namespace {

constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

void CheckSizes(std::size_t n, std::size_t a, std::size_t b, std::size_t c) {
  if (a != n || b != n || c != n) throw ShapeError("kernel inputs have different lengths");
}

// Returns false when the loss is not finite for this row.
bool GradientRow(const LossConfig& loss, double t, int delta, double yhat, GradientPair& out) {
  try {
    const LossEval e = Evaluate(loss, t, delta, yhat);
    out = {e.grad, e.hess};
    return true;
  } catch (const Error&) {
    return false;
  }
}

[[noreturn]] void ThrowBadRow(std::size_t row) {
  throw NumericError("non-finite loss gradient at row " + std::to_string(row));
}

// Scan one feature column for every open node; writes one candidate per slot.
void ScanFeature(int feature, const FeatureMatrix& features, std::span<const std::uint32_t> order,
                 std::span<const GradientPair> gradients, std::span<const int> slot_of_row,
                 std::span<const NodeSums> nodes, const SplitParams& params,
                 std::span<SplitCandidate> best) {
  const std::size_t n_slots = nodes.size();
  std::vector<double> left_grad(n_slots, 0.0);
  std::vector<double> left_hess(n_slots, 0.0);
  std::vector<double> last_value(n_slots, 0.0);
  std::vector<char> seen(n_slots, 0);
  std::fill(best.begin(), best.end(), SplitCandidate{});

  for (const std::uint32_t row : order) {
    const int slot = slot_of_row[row];
    if (slot < 0) continue;
    const double x = features(row, static_cast<std::size_t>(feature));
    if (seen[slot] && x != last_value[slot]) {
      const double gl = left_grad[slot];
      const double hl = left_hess[slot];
      const double gr = nodes[slot].grad - gl;
      const double hr = nodes[slot].hess - hl;
      if (hl >= params.min_child_weight && hr >= params.min_child_weight) {
        const double gain = SplitGain(gl, hl, gr, hr, params);
        if (gain > best[slot].gain) {
          double threshold = last_value[slot] + 0.5 * (x - last_value[slot]);
          if (!(threshold > last_value[slot])) threshold = x;
          best[slot] = {true, feature, threshold, gain, gl, hl};
        }
      }
    }
    left_grad[slot] += gradients[row].grad;
    left_hess[slot] += gradients[row].hess;
    last_value[slot] = x;
    seen[slot] = 1;
  }
}

void ReduceCandidates(const std::vector<std::vector<SplitCandidate>>& per_feature,
                      std::span<SplitCandidate> best) {
  std::fill(best.begin(), best.end(), SplitCandidate{});
  for (const auto& candidates : per_feature) {
    for (std::size_t s = 0; s < best.size(); ++s) {
      if (candidates[s].valid && candidates[s].gain > best[s].gain) best[s] = candidates[s];
    }
  }
}

// Contribution of the unordered pair (i, j) to the Harrell counts.
inline void PairCounts(std::span<const double> time, std::span<const int> event,
                       std::span<const double> predicted, std::size_t i, std::size_t j,
                       std::uint64_t& twice_concordant, std::uint64_t& usable) {
  std::size_t early;
  std::size_t late;
  if (time[i] < time[j]) {
    if (event[i] != 1) return;
    early = i;
    late = j;
  } else if (time[j] < time[i]) {
    if (event[j] != 1) return;
    early = j;
    late = i;
  } else {
    if (event[i] + event[j] != 1) return;
    early = event[i] == 1 ? i : j;
    late = early == i ? j : i;
  }
  ++usable;
  if (predicted[early] < predicted[late]) {
    twice_concordant += 2;
  } else if (predicted[early] == predicted[late]) {
    twice_concordant += 1;
  }
}

}  // namespace

void ComputeGradientsSerial(const LossConfig& loss, std::span<const double> time,
                            std::span<const int> event, std::span<const double> predictions,
                            std::span<GradientPair> out) {
  CheckSizes(time.size(), event.size(), predictions.size(), out.size());
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (!GradientRow(loss, time[i], event[i], predictions[i], out[i])) ThrowBadRow(i);
  }
}

void ComputeGradients(const LossConfig& loss, std::span<const double> time,
                      std::span<const int> event, std::span<const double> predictions,
                      std::span<GradientPair> out) {
  CheckSizes(time.size(), event.size(), predictions.size(), out.size());
  const auto n = static_cast<std::int64_t>(time.size());
  std::size_t first_bad = kNoRow;
#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (std::int64_t i = 0; i < n; ++i) {
    if (!GradientRow(loss, time[i], event[i], predictions[i], out[i])) {
      first_bad = std::min(first_bad, static_cast<std::size_t>(i));
    }
  }
  if (first_bad != kNoRow) ThrowBadRow(first_bad);
}

double MeanLoss(const LossConfig& loss, std::span<const double> time, std::span<const int> event,
                std::span<const double> predictions) {
  CheckSizes(time.size(), event.size(), predictions.size(), time.size());
  if (time.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    total += Evaluate(loss, time[i], event[i], predictions[i]).value;
  }
  return total / static_cast<double>(time.size());
}

SortedColumns SortedColumns::Build(const FeatureMatrix& features) {
  SortedColumns sorted;
  sorted.order.resize(features.cols());
  for (std::size_t f = 0; f < features.cols(); ++f) {
    auto& order = sorted.order[f];
    order.resize(features.rows());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return features(a, f) < features(b, f);
    });
  }
  return sorted;
}

double SplitGain(double left_grad, double left_hess, double right_grad, double right_hess,
                 const SplitParams& params) {
  const double g = left_grad + right_grad;
  const double h = left_hess + right_hess;
  return 0.5 * (left_grad * left_grad / (left_hess + params.lambda) +
                right_grad * right_grad / (right_hess + params.lambda) -
                g * g / (h + params.lambda)) -
         params.gamma;
}

void FindBestSplitsSerial(const FeatureMatrix& features, const SortedColumns& sorted,
                          std::span<const GradientPair> gradients,
                          std::span<const int> slot_of_row, std::span<const NodeSums> nodes,
                          const SplitParams& params, std::span<SplitCandidate> best) {
  const std::size_t n_features = features.cols();
  std::vector<std::vector<SplitCandidate>> per_feature(
      n_features, std::vector<SplitCandidate>(nodes.size()));
  for (std::size_t f = 0; f < n_features; ++f) {
    ScanFeature(static_cast<int>(f), features, sorted.order[f], gradients, slot_of_row, nodes,
                params, per_feature[f]);
  }
  ReduceCandidates(per_feature, best);
}

void FindBestSplits(const FeatureMatrix& features, const SortedColumns& sorted,
                    std::span<const GradientPair> gradients, std::span<const int> slot_of_row,
                    std::span<const NodeSums> nodes, const SplitParams& params,
                    std::span<SplitCandidate> best) {
  const auto n_features = static_cast<std::int64_t>(features.cols());
  std::vector<std::vector<SplitCandidate>> per_feature(
      features.cols(), std::vector<SplitCandidate>(nodes.size()));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t f = 0; f < n_features; ++f) {
    ScanFeature(static_cast<int>(f), features, sorted.order[f], gradients, slot_of_row, nodes,
                params, per_feature[f]);
  }
  ReduceCandidates(per_feature, best);
}

void PredictSerial(const TreeEnsemble& model, const FeatureMatrix& features,
                   std::span<double> out, std::size_t n_trees) {
  if (out.size() != features.rows()) throw ShapeError("prediction buffer has the wrong length");
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out[i] = model.PredictRow(features.Row(i), n_trees);
  }
}

void Predict(const TreeEnsemble& model, const FeatureMatrix& features, std::span<double> out,
             std::size_t n_trees) {
  if (out.size() != features.rows()) throw ShapeError("prediction buffer has the wrong length");
  const auto n = static_cast<std::int64_t>(features.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = model.PredictRow(features.Row(static_cast<std::size_t>(i)), n_trees);
  }
}

ConcordanceCounts ConcordanceSerial(std::span<const double> time, std::span<const int> event,
                                    std::span<const double> predicted) {
  CheckSizes(time.size(), event.size(), predicted.size(), time.size());
  ConcordanceCounts counts;
  for (std::size_t i = 0; i < time.size(); ++i) {
    for (std::size_t j = i + 1; j < time.size(); ++j) {
      PairCounts(time, event, predicted, i, j, counts.twice_concordant, counts.usable);
    }
  }
  return counts;
}

ConcordanceCounts Concordance(std::span<const double> time, std::span<const int> event,
                              std::span<const double> predicted) {
  CheckSizes(time.size(), event.size(), predicted.size(), time.size());
  const auto n = static_cast<std::int64_t>(time.size());
  std::uint64_t twice_concordant = 0;
  std::uint64_t usable = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : twice_concordant, usable)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      PairCounts(time, event, predicted, static_cast<std::size_t>(i),
                 static_cast<std::size_t>(j), twice_concordant, usable);
    }
  }
  return {twice_concordant, usable};
}

}  // namespace claytonboost::kernels
