#include "phishguard/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/learners.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

AnovaScores anova_f_scores(const Matrix& X, const Labels& y) {
  require_binary_labels(X, y, "anova_f_scores");
  const std::size_t n = X.rows();
  if (n < 3) throw InvalidArgument("anova_f_scores: need at least three rows");
  const auto n1 = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw InvalidArgument("anova_f_scores: both classes must be present");
  audit::notify_fit("anova", X);

  AnovaScores out;
  out.f_values.assign(X.cols(), 0.0);
  for (std::size_t j = 0; j < X.cols(); ++j) {
    double lo = X(0, j), hi = X(0, j);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = X(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      (y[i] == 1 ? s1 : s0) += v;
    }
    if (lo == hi) continue;
    const double m0 = s0 / static_cast<double>(n0);
    const double m1 = s1 / static_cast<double>(n1);
    const double m = (s0 + s1) / static_cast<double>(n);
    const double ssb = static_cast<double>(n0) * (m0 - m) * (m0 - m) + static_cast<double>(n1) * (m1 - m) * (m1 - m);
    double ssw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = X(i, j) - (y[i] == 1 ? m1 : m0);
      ssw += dv * dv;
    }
    if (ssw == 0.0) {
      out.f_values[j] = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      out.f_values[j] = ssb / (ssw / static_cast<double>(n - 2));
    }
  }
  return out;
}

Matrix SelectionMask::apply(const Matrix& X) const {
  require_columns(X, input_dim, stage == MaskStage::kbest ? "kbest mask" : "rfecv mask");
  return X.select_columns(kept);
}

SelectionMask SelectionMask::identity(std::size_t d, MaskStage stage) {
  SelectionMask m;
  m.kept.resize(d);
  std::iota(m.kept.begin(), m.kept.end(), 0);
  m.input_dim = d;
  m.stage = stage;
  return m;
}

namespace {

/// Columns by descending score, lower index first on ties.
std::vector<std::size_t> ranking(const AnovaScores& scores) {
  std::vector<std::size_t> order(scores.f_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores.f_values[a] > scores.f_values[b]; });
  return order;
}

std::vector<std::size_t> top_k(const std::vector<std::size_t>& order, std::size_t k) {
  std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

SelectionMask select_k_best(const AnovaScores& scores, std::size_t k) {
  const std::size_t d = scores.f_values.size();
  if (k < 1 || k > d) throw InvalidArgument("select_k_best: k=" + std::to_string(k) + " out of range 1.." + std::to_string(d));
  SelectionMask m;
  m.kept = top_k(ranking(scores), k);
  m.input_dim = d;
  m.stage = MaskStage::kbest;
  return m;
}

std::vector<std::size_t> coarse_k_grid(std::size_t d) {
  std::vector<std::size_t> out;
  for (std::size_t q : {25, 50, 75, 100}) {
    const std::size_t k = std::max<std::size_t>(1, (q * d + 99) / 100);
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> full_k_grid(std::size_t d) {
  std::vector<std::size_t> out(d);
  std::iota(out.begin(), out.end(), 1);
  return out;
}

KChoice choose_k_by_cv(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                       const std::vector<std::size_t>& k_grid) {
  require_binary_labels(X, y, "choose_k_by_cv");
  if (k_grid.empty()) throw InvalidArgument("choose_k_by_cv: empty k grid");
  for (std::size_t k : k_grid) {
    if (k < 1 || k > X.cols()) throw InvalidArgument("choose_k_by_cv: k=" + std::to_string(k) + " out of range");
  }
  const std::size_t K = folds.k;

  struct FoldData {
    Matrix Xtr, Xte;
    Labels ytr, yte;
    std::vector<std::size_t> order;
  };
  std::vector<FoldData> fold_data(K);
  parallel_for(K, [&](std::size_t f) {
    FoldData& fd = fold_data[f];
    const auto tr = folds.train_indices(f);
    const auto te = folds.test_indices(f);
    fd.Xtr = X.select_rows(tr);
    fd.Xte = X.select_rows(te);
    for (std::size_t i : tr) fd.ytr.push_back(y[i]);
    for (std::size_t i : te) fd.yte.push_back(y[i]);
    fd.order = ranking(anova_f_scores(fd.Xtr, fd.ytr));
  });

  std::vector<double> acc(k_grid.size() * K, 0.0);
  parallel_for(acc.size(), [&](std::size_t job) {
    const std::size_t g = job / K;
    const std::size_t f = job % K;
    const FoldData& fd = fold_data[f];
    const auto cols = top_k(fd.order, k_grid[g]);
    try {
      const TrainedModel m = train(spec.with_seed(fold_seed(spec.seed(), f)), fd.Xtr.select_columns(cols), fd.ytr);
      acc[job] = metrics(confusion(fd.yte, m.predict(fd.Xte.select_columns(cols)))).accuracy;
    } catch (const Error& e) {
      throw RuntimeFailure("choose_k fold " + std::to_string(f) + " k=" + std::to_string(k_grid[g]) + ": " + e.what());
    }
  });

  KChoice out;
  double best = -1.0;
  for (std::size_t g = 0; g < k_grid.size(); ++g) {
    const double m = mean(std::span<const double>(acc.data() + g * K, K));
    out.curve.push_back({k_grid[g], m});
    if (m > best || (m == best && k_grid[g] < out.k)) {
      best = m;
      out.k = k_grid[g];
    }
  }
  out.mask = select_k_best(anova_f_scores(X, y), out.k);
  return out;
}

ModelSpec default_rfecv_surrogate(std::uint64_t seed) {
  return ModelSpec(Algorithm::random_forest, {{"n_trees", std::int64_t{200}}}, seed);
}

RfecvResult rfecv(const ModelSpec& spec, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                  const RfecvOptions& options) {
  require_binary_labels(X, y, "rfecv");
  const std::size_t d = X.cols();
  if (options.step < 1) throw InvalidArgument("rfecv: step must be at least 1");
  if (options.min_features < 1 || options.min_features > d) throw InvalidArgument("rfecv: min_features out of range");
  const bool native = !(spec.algorithm() == Algorithm::svm && spec.get_string("kernel") == "rbf");
  if (!native && !options.surrogate) {
    throw ConfigError("rfecv: " + spec.canonical() + " has no feature importances and no surrogate is configured");
  }

  RfecvResult out;
  std::vector<std::size_t> current(d);
  std::iota(current.begin(), current.end(), 0);
  std::vector<std::size_t> best_set = current;
  double best = -1.0;
  for (std::size_t round = 0;; ++round) {
    const Matrix Xc = X.select_columns(current);
    const auto cms = cv_confusions(spec, Xc, y, folds);
    std::vector<double> accs;
    for (const auto& cm : cms) accs.push_back(metrics(cm).accuracy);
    const double m = mean(accs);
    out.curve.push_back({current.size(), m});
    if (m >= best) {
      best = m;
      best_set = current;
    }
    if (current.size() <= options.min_features) break;

    std::optional<std::vector<double>> imp;
    if (native) imp = train(spec.with_seed(derive_seed(spec.seed(), "rfecv", round)), Xc, y).importances();
    if (!imp && options.surrogate) {
      out.used_surrogate = true;
      imp = train(options.surrogate->with_seed(derive_seed(options.surrogate->seed(), "rfecv", round)), Xc, y)
                .importances();
    }
    std::vector<double> w = imp ? *imp : std::vector<double>(current.size(), 0.0);

    std::vector<std::size_t> pos(current.size());
    std::iota(pos.begin(), pos.end(), 0);
    std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      if (w[a] != w[b]) return w[a] < w[b];
      return a > b;
    });
    const std::size_t drop = std::min(options.step, current.size() - options.min_features);
    std::vector<bool> removed(current.size(), false);
    for (std::size_t t = 0; t < drop; ++t) removed[pos[t]] = true;
    std::vector<std::size_t> next;
    for (std::size_t p = 0; p < current.size(); ++p) {
      if (!removed[p]) next.push_back(current[p]);
    }
    current = std::move(next);
  }
  out.mask.kept = best_set;
  out.mask.input_dim = d;
  out.mask.stage = MaskStage::rfecv;
  return out;
}

std::size_t FeatureStages::output_dim() const noexcept { return pca ? pca->n_components() : rfecv.kept.size(); }

Matrix FeatureStages::transform(const Matrix& X_scaled) const {
  Matrix Z = rfecv.apply(kbest.apply(X_scaled));
  if (pca) Z = pca->transform(Z);
  return Z;
}

Matrix pipeline_transform(const FittedPipeline& p, const Matrix& X) {
  require_columns(X, p.input_dim(), "pipeline");
  return p.stages.transform(apply_scaler(p.scaler, X));
}

}  // namespace phishguard
