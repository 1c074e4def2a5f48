#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/featsel.hpp"
#include "phishguard/search.hpp"

namespace phishguard {

inline constexpr int kReportFormatVersion = 1;

struct DatasetInfo {
  std::string source;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t n_phishing = 0;
  std::vector<std::string> feature_names;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t train_rows_balanced = 0;  // after SMOTE
  std::size_t synthetic_rows = 0;
  bool operator==(const DatasetInfo&) const = default;
};

struct ModelReport {
  Algorithm algorithm = Algorithm::svm;
  Hyperparameters hyperparameters;  // tuned
  std::size_t rank = 0;             // 1-based
  MetricsRecord test;
  ConfusionMatrix test_confusion;
  std::vector<double> cv_fold_accuracy;
  double cv_accuracy = 0.0;
  double cv_accuracy_std = 0.0;
  double cv_f1 = 0.0;
  std::size_t search_trials = 0;
  std::size_t chosen_k = 0;
  std::vector<CurvePoint> k_curve;
  std::vector<std::size_t> kbest_kept;   // original column indices
  std::vector<std::size_t> rfecv_kept;   // original column indices
  std::vector<CurvePoint> rfecv_curve;
  bool rfecv_surrogate = false;
  std::optional<std::size_t> pca_components;
  std::vector<double> pca_variance_ratio;
  bool operator==(const ModelReport&) const = default;
};

struct EnsembleReport {
  Algorithm meta = Algorithm::svm;
  std::vector<Algorithm> bases;
  MetricsRecord test;
  ConfusionMatrix test_confusion;
  std::string scheme;         // oof | insample
  std::string meta_features;  // scores | hard_labels
  std::size_t k_folds = 0;
  bool operator==(const EnsembleReport&) const = default;
};

struct ExperimentReport {
  int format_version = kReportFormatVersion;
  nlohmann::json config;
  std::string config_digest;
  DatasetInfo dataset;
  std::vector<ModelReport> models;  // in rank order
  EnsembleReport phishguard;
  /// Timestamp, timings, thread count and output location. Excluded from
  /// determinism comparisons.
  nlohmann::json volatile_info = nlohmann::json::object();

  const ModelReport* find(Algorithm a) const;
  bool operator==(const ExperimentReport&) const;
};

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Pretty JSON with the volatile field removed.
std::string deterministic_dump(const ExperimentReport& r);

/// value in [0, 1] as a percentage with 2 decimals, rounding half up.
std::string format_percent(double value);

/// One row per model in rank order plus PhishGuard; Acc. Prec. Rec. F1 in %.
std::string render_table(const ExperimentReport& r);
/// Test accuracy (%) of every model and PhishGuard, one column per report.
std::string render_compare(const std::vector<ExperimentReport>& reports);

}  // namespace phishguard
