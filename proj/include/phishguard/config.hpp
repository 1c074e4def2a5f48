#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishguard/data.hpp"
#include "phishguard/ensemble.hpp"
#include "phishguard/search.hpp"

namespace phishguard {

struct SyntheticConfig {
  std::string kind = "blobs";  // blobs | noisy_xor
  std::size_t n = 2000;
  std::size_t d = 10;
  double distance = 4.0;  // blobs
  double flip = 0.05;     // noisy_xor
  std::uint64_t seed = 0;
};

struct DatasetConfig {
  std::optional<std::string> preset;
  std::string path;  // resolved
  DatasetSchema schema;
  std::optional<SyntheticConfig> synthetic;
  /// For presets: fail when the row/feature/class counts differ.
  bool verify_counts = false;
};

enum class KGridMode { coarse, full, list };
enum class SearchMode { grid, random };

struct SmoteConfig {
  bool enabled = true;
  std::size_t k_neighbors = 5;
  double target_ratio = 1.0;
};

struct FeatselConfig {
  KGridMode k_grid = KGridMode::coarse;
  std::vector<std::size_t> k_list;
  bool pca = true;
  double variance_threshold = 0.95;
  std::size_t rfecv_step = 1;
  std::size_t rfecv_min_features = 1;
  std::int64_t surrogate_trees = 200;
};

struct SearchConfig {
  SearchMode mode = SearchMode::grid;
  std::size_t random_trials = 10;
};

struct ModelConfig {
  ParamGrid grid;
  Distributions distributions;
  /// Hyperparameters used while choosing k and running RFECV.
  Hyperparameters selection;
};

struct StackingConfig {
  StackingScheme scheme = StackingScheme::out_of_fold;
  MetaFeatureKind meta_features = MetaFeatureKind::scores;
  std::size_t k_folds = 5;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  double test_fraction = 0.2;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  SmoteConfig smote;
  FeatselConfig featsel;
  SearchConfig search;
  std::vector<Algorithm> algorithms;
  std::map<Algorithm, ModelConfig> models;
  StackingConfig stacking;
  std::string output_dir;  // empty: no artifacts written
  int threads = 1;
};

ParamGrid default_grid(Algorithm a);
Distributions default_distributions(Algorithm a);

/// Validates and fills defaults. Relative paths resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir);
/// Reads a JSON config file, applies an optional JSON merge patch, then parses.
ExperimentConfig load_config(const std::string& path, const nlohmann::json& overrides = nullptr);

/// Normalized echo of everything that affects results. Output location and
/// thread count are excluded.
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Hex FNV-1a of the normalized echo.
std::string config_digest(const ExperimentConfig& c);

nlohmann::json hyper_value_to_json(const HyperValue& v);
HyperValue hyper_value_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace phishguard
