#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "claytonboost/loss.hpp"

namespace claytonboost {

// First and second derivative of the loss for one row.
struct GradientPair {
  double grad = 0.0;
  double hess = 0.0;
};

struct TreeNode {
  int split_feature = -1;
  double threshold = 0.0;  // rows with x < threshold go left
  int left = -1;
  int right = -1;
  bool default_left = true;  // direction for missing values (unused: inputs are complete)
  double weight = 0.0;       // leaf weight -G / (H + lambda), before shrinkage
  double gain = 0.0;         // split gain, internal nodes only
  double sum_grad = 0.0;
  double sum_hess = 0.0;

  bool IsLeaf() const { return left < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }

  // Leaf weight reached by `row`.
  double Predict(std::span<const double> row) const;
  // Index of the leaf reached by `row`.
  int LeafIndex(std::span<const double> row) const;
  int Depth() const;
  int LeafCount() const;

 private:
  std::vector<TreeNode> nodes_;
};

// h(x) = base_score + sum_k learning_rate * tree_k(x), on the log-time scale.
struct TreeEnsemble {
  double base_score = 0.0;
  double learning_rate = 1.0;
  std::size_t n_features = 0;
  LossConfig loss;
  std::vector<RegressionTree> trees;

  // Uses the first `n_trees` trees (all if larger than the ensemble).
  double PredictRow(std::span<const double> row, std::size_t n_trees = static_cast<std::size_t>(-1)) const;
};

}  // namespace claytonboost
