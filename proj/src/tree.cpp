#include <algorithm>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/trees.hpp"
#include "tree_builder.hpp"
#include "tree_policies.hpp"

namespace phishguard {

double Tree::evaluate(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& nd = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right);
  }
  return nodes[i].value;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& nd) { return nd.feature < 0; }));
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

double ObliviousTree::evaluate(std::span<const double> x) const {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < features.size(); ++l) {
    idx = (idx << 1) | (x[static_cast<std::size_t>(features[l])] < thresholds[l] ? 0U : 1U);
  }
  return leaf_values[idx];
}

nlohmann::json tree_to_json(const Tree& t) {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& nd : t.nodes) {
    feature.push_back(nd.feature);
    threshold.push_back(nd.threshold);
    left.push_back(nd.left);
    right.push_back(nd.right);
    value.push_back(nd.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from_json(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw IoError("malformed tree payload");
  }
  Tree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0) {
      const auto in_range = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(n); };
      if (!in_range(left[i]) || !in_range(right[i])) throw IoError("malformed tree payload: bad child index");
    }
  }
  return t;
}

Tree fit_cart(const Matrix& X, const Labels& y, std::span<const double> weights, std::size_t max_depth,
              std::size_t min_samples_leaf, double min_impurity_decrease, std::vector<double>& raw_importance) {
  const detail::ColumnOrder order(X);
  const detail::GiniPolicy policy(y, weights, min_samples_leaf, min_impurity_decrease);
  return detail::grow_tree(X, order, policy, detail::GrowOptions{max_depth, 0}, nullptr, raw_importance);
}

// ---------------------------------------------------------------------------

DecisionTreeModel::DecisionTreeModel(Tree tree, std::vector<double> raw_importance)
    : tree_(std::move(tree)), raw_importance_(std::move(raw_importance)) {}

std::vector<double> DecisionTreeModel::score(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = tree_.evaluate(X.row(i));
  return out;
}

std::optional<std::vector<double>> DecisionTreeModel::importances() const {
  return normalize_importances(raw_importance_);
}

nlohmann::json DecisionTreeModel::to_json() const {
  return {{"tree", tree_to_json(tree_)}, {"raw_importance", raw_importance_}};
}

std::shared_ptr<DecisionTreeModel> DecisionTreeModel::from_json(const nlohmann::json& j) {
  return std::make_shared<DecisionTreeModel>(tree_from_json(j.at("tree")),
                                             j.at("raw_importance").get<std::vector<double>>());
}

TrainedModel train_decision_tree(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::decision_tree) throw InvalidArgument("train_decision_tree: wrong spec");
  require_binary_labels(X, y, "train_decision_tree");
  if (X.rows() < 2) throw InvalidArgument("train_decision_tree: need at least two rows");
  audit::notify_fit("train:decision_tree", X);
  std::vector<double> importance;
  Tree tree = fit_cart(X, y, {}, static_cast<std::size_t>(spec.get_int("max_depth")),
                       static_cast<std::size_t>(spec.get_int("min_samples_leaf")),
                       spec.get_double("min_impurity_decrease"), importance);
  return TrainedModel(spec, std::make_shared<DecisionTreeModel>(std::move(tree), std::move(importance)), X.cols());
}

}  // namespace phishguard
