#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "phishguard/featsel.hpp"
#include "phishguard/learners.hpp"

namespace phishguard {

/// A tuned model and the feature stages its inputs pass through. Stages are
/// applied to scaled features; nullopt means the input is used as is.
struct BaseLearner {
  ModelSpec spec;
  std::optional<FeatureStages> stages;

  Matrix features(const Matrix& X_scaled) const;
};

enum class MetaFeatureKind { scores, hard_labels };
enum class StackingScheme { out_of_fold, in_sample };

struct StackingOptions {
  std::size_t k_folds = 5;
  MetaFeatureKind meta_features = MetaFeatureKind::scores;
  StackingScheme scheme = StackingScheme::out_of_fold;
  std::uint64_t seed = 0;
};

/// Called for every (base, fold) model fit during meta-feature construction.
using MetaObserver = std::function<void(std::size_t base, std::size_t fold, std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> scored_rows)>;

/// n x bases.size() matrix; entry (i, j) comes from base j trained on every
/// fold except the one holding row i.
Matrix oof_meta_features(const std::vector<BaseLearner>& bases, const Matrix& X_scaled, const Labels& y,
                         const FoldAssignment& folds, MetaFeatureKind kind = MetaFeatureKind::scores,
                         const MetaObserver& observer = {});

class StackingModel {
 public:
  StackingModel(std::vector<BaseLearner> bases, std::vector<TrainedModel> base_models, TrainedModel meta_model,
                StackingOptions options, std::vector<Algorithm> ranking);

  const std::vector<BaseLearner>& bases() const noexcept { return bases_; }
  const std::vector<TrainedModel>& base_models() const noexcept { return base_models_; }
  const TrainedModel& meta_model() const noexcept { return meta_model_; }
  const ModelSpec& meta_spec() const noexcept { return meta_model_.spec(); }
  const StackingOptions& options() const noexcept { return options_; }
  /// Algorithms in rank order at build time (meta first).
  const std::vector<Algorithm>& ranking() const noexcept { return ranking_; }
  std::size_t input_dim() const noexcept { return input_dim_; }

  /// Base outputs on scaled rows, one column per base.
  Matrix meta_features(const Matrix& X_scaled) const;
  std::vector<double> score(const Matrix& X_scaled) const;
  Labels predict(const Matrix& X_scaled) const;

  nlohmann::json to_json() const;
  static StackingModel from_json(const nlohmann::json& j);

 private:
  std::vector<BaseLearner> bases_;
  std::vector<TrainedModel> base_models_;
  TrainedModel meta_model_;
  StackingOptions options_;
  std::vector<Algorithm> ranking_;
  std::size_t input_dim_ = 0;
};

struct RankedModel {
  BaseLearner learner;
  double cv_accuracy = 0.0;
  /// Model already fit on the full training matrix, reused when present.
  std::optional<TrainedModel> fitted;
};

/// Rank 1 becomes the meta-model with its tuned hyperparameters; ranks 2-4
/// are the bases. Meta-training uses out-of-fold (or, optionally, in-sample)
/// base outputs; bases are refit on all rows for inference.
StackingModel build_phishguard(const std::vector<RankedModel>& ranked, const Matrix& X_scaled, const Labels& y,
                               const StackingOptions& options, const MetaObserver& observer = {});

struct StackingPrediction {
  Labels labels;
  std::vector<double> scores;
};
StackingPrediction stacking_predict(const StackingModel& m, const Matrix& X_scaled);

}  // namespace phishguard
