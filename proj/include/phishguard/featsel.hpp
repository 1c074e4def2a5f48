#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "phishguard/data.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/hyperparams.hpp"
#include "phishguard/pca.hpp"

namespace phishguard {

/// One-way ANOVA F statistic per feature (two groups). A constant feature
/// scores 0; zero within-class variance with distinct class means scores +inf.
struct AnovaScores {
  std::vector<double> f_values;
};

AnovaScores anova_f_scores(const Matrix& X, const Labels& y);

enum class MaskStage { kbest, rfecv };

/// Strictly increasing column indices kept out of `input_dim`.
struct SelectionMask {
  std::vector<std::size_t> kept;
  std::size_t input_dim = 0;
  MaskStage stage = MaskStage::kbest;

  Matrix apply(const Matrix& X) const;
  static SelectionMask identity(std::size_t d, MaskStage stage);
  bool operator==(const SelectionMask&) const = default;
};

/// Indices of the k highest scores; ties go to the lower column index.
SelectionMask select_k_best(const AnovaScores& scores, std::size_t k);

/// ceil(q * d) for q in {0.25, 0.5, 0.75, 1}, at least 1, deduplicated.
std::vector<std::size_t> coarse_k_grid(std::size_t d);
/// 1, 2, ..., d.
std::vector<std::size_t> full_k_grid(std::size_t d);

struct CurvePoint {
  std::size_t size = 0;
  double mean_accuracy = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

struct KChoice {
  std::size_t k = 0;
  std::vector<CurvePoint> curve;  // in k_grid order
  SelectionMask mask;             // top-k by ANOVA on all of X
};

/// Mean CV accuracy of spec on the top-k features for each k in k_grid.
/// Within each fold the ANOVA ranking uses only that fold's training rows.
/// Ties go to the smallest k.
KChoice choose_k_by_cv(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                       const std::vector<std::size_t>& k_grid);

struct RfecvOptions {
  std::size_t step = 1;
  std::size_t min_features = 1;
  /// Supplies the elimination order when spec has no importances.
  std::optional<ModelSpec> surrogate;
};

struct RfecvResult {
  SelectionMask mask;
  std::vector<CurvePoint> curve;  // sizes in decreasing order
  bool used_surrogate = false;
};

/// Default surrogate: a 200-tree forest with default depth.
ModelSpec default_rfecv_surrogate(std::uint64_t seed);

/// Recursive elimination: at each size, score spec by CV, then fit on all
/// rows and drop the `step` least important features (the higher index goes
/// first on equal importance). Returns the best size, ties toward fewer
/// features.
RfecvResult rfecv(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                  const RfecvOptions& options = {});

/// kbest -> rfecv -> optional PCA, applied to already-scaled features.
struct FeatureStages {
  SelectionMask kbest;
  SelectionMask rfecv;
  std::optional<PcaModel> pca;

  std::size_t input_dim() const noexcept { return kbest.input_dim; }
  std::size_t output_dim() const noexcept;
  Matrix transform(const Matrix& X_scaled) const;
};

struct FittedPipeline {
  Scaler scaler;
  FeatureStages stages;

  std::size_t input_dim() const noexcept { return scaler.dim(); }
  std::size_t output_dim() const noexcept { return stages.output_dim(); }
};

/// scaler -> kbest -> rfecv -> PCA using fitted state only.
Matrix pipeline_transform(const FittedPipeline& p, const Matrix& X);

}  // namespace phishguard
