#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "phishguard/data.hpp"
#include "phishguard/hyperparams.hpp"
#include "phishguard/matrix.hpp"

namespace phishguard {

/// Counts with phishing (1) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted);

struct MetricsRecord {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool operator==(const MetricsRecord&) const = default;
};

/// precision = 0 when tp + fp = 0, recall = 0 when tp + fn = 0,
/// f1 = 0 when precision + recall = 0. Throws on an empty matrix.
MetricsRecord metrics(const ConfusionMatrix& cm);

enum class Metric { accuracy, precision, recall, f1 };
Metric parse_metric(std::string_view name);
double metric_value(const MetricsRecord& m, Metric metric);

/// Called once per fold with the rows used for training and for scoring.
using FoldObserver =
    std::function<void(std::size_t fold, std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows)>;

/// Seed of the model trained for one CV fold.
std::uint64_t fold_seed(std::uint64_t model_seed, std::size_t fold);

/// Trains spec on all folds but f and evaluates on fold f, for every f.
/// Folds run in parallel; a failure is rethrown naming the fold.
std::vector<ConfusionMatrix> cv_confusions(const ModelSpec& spec, const Matrix& X, const Labels& y,
                                           const FoldAssignment& folds, const FoldObserver& observer = {});

std::vector<double> cv_score(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                             Metric metric = Metric::accuracy, const FoldObserver& observer = {});

double mean(std::span<const double> v);
/// Population standard deviation.
double stddev(std::span<const double> v);

}  // namespace phishguard
