#include <vector>

#include "claytonboost/booster.hpp"

namespace claytonboost {

RegressionTree GrowTree(const FeatureMatrix& features, const kernels::SortedColumns& sorted,
                        std::span<const GradientPair> gradients, const TrainConfig& config) {
  const std::size_t n = features.rows();
  const kernels::SplitParams params = config.SplitParameters();

  std::vector<TreeNode> nodes(1);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[0].sum_grad += gradients[i].grad;
    nodes[0].sum_hess += gradients[i].hess;
  }

  // Open nodes of the current level, indexed by slot.
  std::vector<int> open = {0};
  std::vector<int> slot_of_row(n, 0);

  for (int depth = 0; depth < config.max_depth && !open.empty(); ++depth) {
    std::vector<kernels::NodeSums> sums(open.size());
    for (std::size_t s = 0; s < open.size(); ++s) {
      sums[s] = {nodes[open[s]].sum_grad, nodes[open[s]].sum_hess};
    }
    std::vector<kernels::SplitCandidate> best(open.size());
    kernels::FindBestSplits(features, sorted, gradients, slot_of_row, sums, params, best);

    // Children of split nodes get slots in the next level, left before right.
    std::vector<int> next_open;
    std::vector<int> left_slot(open.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) {
      if (!best[s].valid) continue;
      const int parent = open[s];
      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      TreeNode& node = nodes[parent];
      node.split_feature = best[s].feature;
      node.threshold = best[s].threshold;
      node.gain = best[s].gain;
      node.left = left;
      node.right = left + 1;
      left_slot[s] = static_cast<int>(next_open.size());
      next_open.push_back(left);
      next_open.push_back(left + 1);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const int s = slot_of_row[i];
      if (s < 0) continue;
      if (left_slot[s] < 0) {
        slot_of_row[i] = -1;
        continue;
      }
      const TreeNode& node = nodes[open[s]];
      const bool go_left = features(i, static_cast<std::size_t>(node.split_feature)) < node.threshold;
      const int slot = left_slot[s] + (go_left ? 0 : 1);
      slot_of_row[i] = slot;
      TreeNode& child = nodes[next_open[slot]];
      child.sum_grad += gradients[i].grad;
      child.sum_hess += gradients[i].hess;
    }
    open = std::move(next_open);
  }

  for (TreeNode& node : nodes) {
    if (node.IsLeaf()) node.weight = -node.sum_grad / (node.sum_hess + config.lambda);
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace claytonboost
