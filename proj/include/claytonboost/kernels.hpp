#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference with the same
// signature; both produce bitwise-identical results for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "claytonboost/dataset.hpp"
#include "claytonboost/loss.hpp"
#include "claytonboost/tree.hpp"

namespace claytonboost::kernels {

// Per-row loss gradients at the current predictions. Throws NumericError naming
// the lowest offending row when the loss is not finite.
void ComputeGradientsSerial(const LossConfig& loss, std::span<const double> time,
                            std::span<const int> event, std::span<const double> predictions,
                            std::span<GradientPair> out);
void ComputeGradients(const LossConfig& loss, std::span<const double> time,
                      std::span<const int> event, std::span<const double> predictions,
                      std::span<GradientPair> out);

// Mean loss value over rows.
double MeanLoss(const LossConfig& loss, std::span<const double> time, std::span<const int> event,
                std::span<const double> predictions);

// Row indices of each feature column in ascending value order (ties by row index).
struct SortedColumns {
  std::vector<std::vector<std::uint32_t>> order;

  static SortedColumns Build(const FeatureMatrix& features);
};

struct SplitParams {
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
};

struct NodeSums {
  double grad = 0.0;
  double hess = 0.0;
};

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double left_grad = 0.0;
  double left_hess = 0.0;
};

// Structure score improvement of splitting (G, H) into left and right children.
double SplitGain(double left_grad, double left_hess, double right_grad, double right_hess,
                 const SplitParams& params);

// Exact greedy search for every open node of one tree level. `slot_of_row` maps
// each row to its node slot (or -1 when the row sits in a finished leaf); `best`
// receives one candidate per slot. Ties resolve to the lowest feature index,
// then the lowest threshold.
void FindBestSplitsSerial(const FeatureMatrix& features, const SortedColumns& sorted,
                          std::span<const GradientPair> gradients,
                          std::span<const int> slot_of_row, std::span<const NodeSums> nodes,
                          const SplitParams& params, std::span<SplitCandidate> best);
void FindBestSplits(const FeatureMatrix& features, const SortedColumns& sorted,
                    std::span<const GradientPair> gradients, std::span<const int> slot_of_row,
                    std::span<const NodeSums> nodes, const SplitParams& params,
                    std::span<SplitCandidate> best);

void PredictSerial(const TreeEnsemble& model, const FeatureMatrix& features,
                   std::span<double> out, std::size_t n_trees = static_cast<std::size_t>(-1));
void Predict(const TreeEnsemble& model, const FeatureMatrix& features, std::span<double> out,
             std::size_t n_trees = static_cast<std::size_t>(-1));

// Harrell pair counts. `twice_concordant` counts concordant pairs twice and
// prediction ties once, so the index is twice_concordant / (2 * usable).
struct ConcordanceCounts {
  std::uint64_t twice_concordant = 0;
  std::uint64_t usable = 0;
};

ConcordanceCounts ConcordanceSerial(std::span<const double> time, std::span<const int> event,
                                    std::span<const double> predicted);
ConcordanceCounts Concordance(std::span<const double> time, std::span<const int> event,
                              std::span<const double> predicted);

}  // namespace claytonboost::kernels
