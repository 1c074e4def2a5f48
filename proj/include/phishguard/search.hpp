#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phishguard/evaluation.hpp"

namespace phishguard {

struct Trial {
  ModelSpec spec;
  std::vector<ConfusionMatrix> folds;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct SearchResult {
  ModelSpec best_spec;
  double best_cv_mean = 0.0;
  std::size_t best_index = 0;
  std::vector<Trial> trials;
};

/// Total order used to break equal CV means: fewer rounds/trees/estimators,
/// then smaller depth (unlimited counts as largest), then lower C, then the
/// canonical spec string.
bool tie_precedes(const ModelSpec& a, const ModelSpec& b);

/// Values per hyperparameter name; the grid is their Cartesian product.
using ParamGrid = std::map<std::string, std::vector<HyperValue>>;

/// Expands a grid into validated specs carrying `seed`. For a linear SVM the
/// gamma value is irrelevant and reset to its default; duplicate specs are
/// removed, keeping first occurrence.
std::vector<ModelSpec> expand_grid(Algorithm algorithm, const ParamGrid& grid, std::uint64_t seed);

/// Evaluates every spec with cv_score and returns the best mean.
SearchResult grid_search(const std::vector<ModelSpec>& grid, const Matrix& X, const Labels& y,
                         const FoldAssignment& folds, Metric metric = Metric::accuracy);

struct Distribution {
  enum class Kind { log_uniform, uniform, uniform_int, choice };
  Kind kind = Kind::uniform;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<HyperValue> choices;
};
using Distributions = std::map<std::string, Distribution>;

/// n_trials specs drawn from independent per-trial streams of seed. Integer
/// ranges are inclusive.
std::vector<ModelSpec> sample_specs(Algorithm algorithm, const Distributions& dists, std::size_t n_trials,
                                    std::uint64_t seed, std::uint64_t model_seed);

SearchResult random_search(Algorithm algorithm, const Distributions& dists, std::size_t n_trials, std::uint64_t seed,
                           std::uint64_t model_seed, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                           Metric metric = Metric::accuracy);

struct RankEntry {
  Algorithm algorithm;
  double accuracy = 0.0;
  double f1 = 0.0;
};

/// Descending accuracy, then descending F1, then the fixed algorithm order
/// svm, random_forest, xgb_style, catboost_style, adaboost, gradient_boosting.
/// Throws on an empty list or a repeated algorithm.
std::vector<RankEntry> rank_models(std::vector<RankEntry> entries);

}  // namespace phishguard
