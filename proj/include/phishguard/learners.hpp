#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "phishguard/hyperparams.hpp"
#include "phishguard/matrix.hpp"

namespace phishguard {

/// Fitted state of one algorithm. Implementations are immutable after
/// training and safe to share between threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  /// Phishing scores in [0, 1], one per row.
  virtual std::vector<double> score(const Matrix& X) const = 0;

  /// Normalized feature importances, or nullopt when the model has none
  /// (rbf SVM) or they are all zero (constant model).
  virtual std::optional<std::vector<double>> importances() const = 0;

  virtual nlohmann::json to_json() const = 0;
};

/// Persistence format version of each algorithm's payload.
int model_format_version(Algorithm a);

class TrainedModel {
 public:
  TrainedModel(ModelSpec spec, std::shared_ptr<const Classifier> impl, std::size_t input_dim);

  const ModelSpec& spec() const noexcept { return spec_; }
  std::size_t input_dim() const noexcept { return input_dim_; }

  std::vector<double> score(const Matrix& X) const;
  /// 1 iff score >= 0.5.
  Labels predict(const Matrix& X) const;
  std::optional<std::vector<double>> importances() const;

  /// Downcast to the concrete fitted state; nullptr on mismatch.
  template <class T>
  const T* as() const {
    return dynamic_cast<const T*>(impl_.get());
  }

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  ModelSpec spec_;
  std::shared_ptr<const Classifier> impl_;
  std::size_t input_dim_;
};

/// Trains the classifier described by spec on X, y.
TrainedModel train(const ModelSpec& spec, const Matrix& X, const Labels& y);

// Per-algorithm entry points; hyperparameters come from the spec.
TrainedModel train_decision_tree(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_random_forest(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_gradient_boosting(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_xgb_style(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_catboost_style(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_adaboost(const Matrix& X, const Labels& y, const ModelSpec& spec);
TrainedModel train_svm(const Matrix& X, const Labels& y, const ModelSpec& spec);

Labels predict(const TrainedModel& m, const Matrix& X);
std::vector<double> score(const TrainedModel& m, const Matrix& X);
std::optional<std::vector<double>> importances(const TrainedModel& m);

/// Normalizes non-negative raw importances to sum 1; nullopt if all zero.
std::optional<std::vector<double>> normalize_importances(std::vector<double> raw);

double sigmoid(double x);

}  // namespace phishguard
