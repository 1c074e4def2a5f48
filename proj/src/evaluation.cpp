#include "phishguard/evaluation.hpp"

#include <cmath>
#include <numeric>

#include "phishguard/error.hpp"
#include "phishguard/learners.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size()) throw InvalidArgument("confusion: length mismatch");
  if (truth.empty()) throw InvalidArgument("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) throw InvalidArgument("confusion: labels must be 0 or 1");
    if (t == 1) {
      (p == 1 ? cm.tp : cm.fn) += 1;
    } else {
      (p == 1 ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

MetricsRecord metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("metrics: empty confusion matrix");
  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  MetricsRecord m;
  m.accuracy = d(cm.tp + cm.tn) / d(cm.total());
  m.precision = cm.tp + cm.fp == 0 ? 0.0 : d(cm.tp) / d(cm.tp + cm.fp);
  m.recall = cm.tp + cm.fn == 0 ? 0.0 : d(cm.tp) / d(cm.tp + cm.fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metric parse_metric(std::string_view name) {
  if (name == "accuracy") return Metric::accuracy;
  if (name == "precision") return Metric::precision;
  if (name == "recall") return Metric::recall;
  if (name == "f1") return Metric::f1;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

double metric_value(const MetricsRecord& m, Metric metric) {
  switch (metric) {
    case Metric::accuracy: return m.accuracy;
    case Metric::precision: return m.precision;
    case Metric::recall: return m.recall;
    case Metric::f1: return m.f1;
  }
  return m.accuracy;
}

std::uint64_t fold_seed(std::uint64_t model_seed, std::size_t fold) { return derive_seed(model_seed, "fold", fold); }

std::vector<ConfusionMatrix> cv_confusions(const ModelSpec& spec, const Matrix& X, const Labels& y,
                                           const FoldAssignment& folds, const FoldObserver& observer) {
  require_binary_labels(X, y, "cv");
  if (folds.fold_of.size() != X.rows()) throw InvalidArgument("cv: fold assignment does not match the data");
  std::vector<ConfusionMatrix> out(folds.k);
  parallel_for(folds.k, [&](std::size_t f) {
    const auto train_rows = folds.train_indices(f);
    const auto test_rows = folds.test_indices(f);
    if (observer) observer(f, train_rows, test_rows);
    Labels ytr, yte;
    for (std::size_t i : train_rows) ytr.push_back(y[i]);
    for (std::size_t i : test_rows) yte.push_back(y[i]);
    try {
      const TrainedModel m = train(spec.with_seed(fold_seed(spec.seed(), f)), X.select_rows(train_rows), ytr);
      out[f] = confusion(yte, m.predict(X.select_rows(test_rows)));
    } catch (const Error& e) {
      throw RuntimeFailure("fold " + std::to_string(f) + " of " + spec.canonical() + ": " + e.what());
    }
  });
  return out;
}

std::vector<double> cv_score(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                             Metric metric, const FoldObserver& observer) {
  const auto cms = cv_confusions(spec, X, y, folds, observer);
  std::vector<double> scores;
  scores.reserve(cms.size());
  for (const auto& cm : cms) scores.push_back(metric_value(metrics(cm), metric));
  return scores;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace phishguard
