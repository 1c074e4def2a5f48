#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "phishguard/learners.hpp"

namespace phishguard {

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // rows with x[feature] < threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

/// Binary axis-aligned tree; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  double evaluate(std::span<const double> x) const;
  std::size_t leaf_count() const;
  std::size_t depth() const;
  bool operator==(const Tree&) const = default;
};

/// Oblivious tree: one (feature, threshold) per level shared by every node
/// of that level, so a row's leaf is the bit pattern of its comparisons.
struct ObliviousTree {
  std::vector<std::int32_t> features;
  std::vector<double> thresholds;
  std::vector<double> leaf_values;  // 2^depth entries

  double evaluate(std::span<const double> x) const;
  bool operator==(const ObliviousTree&) const = default;
};

/// CART tree with Gini splits; leaf value = weighted positive fraction.
class DecisionTreeModel final : public Classifier {
 public:
  DecisionTreeModel(Tree tree, std::vector<double> raw_importance);
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<DecisionTreeModel> from_json(const nlohmann::json& j);

  const Tree& tree() const noexcept { return tree_; }

 private:
  Tree tree_;
  std::vector<double> raw_importance_;
};

class RandomForestModel final : public Classifier {
 public:
  RandomForestModel(std::vector<Tree> trees, std::vector<double> raw_importance);
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<RandomForestModel> from_json(const nlohmann::json& j);

  const std::vector<Tree>& trees() const noexcept { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::vector<double> raw_importance_;
};

/// Additive logistic model over regression trees (gradient_boosting and
/// xgb_style). Leaf values already include the learning rate.
class BoostedTreesModel final : public Classifier {
 public:
  BoostedTreesModel(double base_margin, std::vector<Tree> trees, std::vector<double> raw_importance,
                    std::vector<double> loss_trace);
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<BoostedTreesModel> from_json(const nlohmann::json& j);

  std::vector<double> margin(const Matrix& X) const;
  double base_margin() const noexcept { return base_margin_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }
  /// Mean training log-loss before the first round and after each round.
  const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

 private:
  double base_margin_;
  std::vector<Tree> trees_;
  std::vector<double> raw_importance_;
  std::vector<double> loss_trace_;
};

class ObliviousBoostModel final : public Classifier {
 public:
  ObliviousBoostModel(double base_margin, std::vector<ObliviousTree> trees, std::vector<double> raw_importance,
                      std::vector<double> loss_trace);
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<ObliviousBoostModel> from_json(const nlohmann::json& j);

  std::vector<double> margin(const Matrix& X) const;
  const std::vector<ObliviousTree>& trees() const noexcept { return trees_; }
  const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

 private:
  double base_margin_;
  std::vector<ObliviousTree> trees_;
  std::vector<double> raw_importance_;
  std::vector<double> loss_trace_;
};

/// Discrete two-class AdaBoost. Score = sigmoid(sum_t alpha_t h_t(x)) with
/// h_t in {-1, +1}.
class AdaBoostModel final : public Classifier {
 public:
  enum class Stop { completed, perfect_learner, weak_learner_failed };

  AdaBoostModel(std::vector<Tree> learners, std::vector<double> alphas, std::vector<double> errors,
                std::vector<double> raw_importance, Stop stop);
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<AdaBoostModel> from_json(const nlohmann::json& j);

  std::vector<double> margin(const Matrix& X) const;
  const std::vector<Tree>& learners() const noexcept { return learners_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  /// Weighted training error of each accepted learner.
  const std::vector<double>& errors() const noexcept { return errors_; }
  Stop stop_reason() const noexcept { return stop_; }

 private:
  std::vector<Tree> learners_;
  std::vector<double> alphas_;
  std::vector<double> errors_;
  std::vector<double> raw_importance_;
  Stop stop_;
};

/// alpha = learning_rate * 0.5 * ln((1 - error) / error). An error of 0 is
/// clamped to 1e-10, which caps alpha.
double adaboost_alpha(double weighted_error, double learning_rate);

/// CART on weighted rows (empty weights = all ones); the building block of
/// the forest and AdaBoost.
Tree fit_cart(const Matrix& X, const Labels& y, std::span<const double> weights, std::size_t max_depth,
              std::size_t min_samples_leaf, double min_impurity_decrease, std::vector<double>& raw_importance);

nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);

}  // namespace phishguard
