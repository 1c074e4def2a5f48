#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishguard/matrix.hpp"

namespace phishguard {

/// Immutable n x d feature matrix with binary labels (1 = phishing).
class Dataset {
 public:
  /// Validates: finite features, binary labels with both classes present,
  /// d >= 1, n >= 2, unique feature names.
  Dataset(Matrix features, Labels labels, std::vector<std::string> feature_names, std::string source_name);

  const Matrix& features() const noexcept { return features_; }
  const Labels& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::string& source_name() const noexcept { return source_name_; }

  std::size_t n() const noexcept { return features_.rows(); }
  std::size_t d() const noexcept { return features_.cols(); }
  std::size_t count(int label) const;

  /// Rows in the given order, same feature names.
  Dataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  Matrix features_;
  Labels labels_;
  std::vector<std::string> feature_names_;
  std::string source_name_;
};

enum class FileFormat { csv, arff };

/// How a raw file maps onto a Dataset.
struct DatasetSchema {
  /// Column name, or zero-based index for header-less files.
  std::variant<std::string, std::size_t> label_column = std::string("label");
  /// Raw label token meaning phishing; mapped to 1.
  std::string positive_raw_value = "1";
  /// When set, any label token other than the two declared ones is an error.
  std::optional<std::string> negative_raw_value;
  char delimiter = ',';
  bool has_header = true;
  /// Non-feature columns (URLs, ids) removed before numeric parsing.
  std::vector<std::string> drop_columns;
  FileFormat format = FileFormat::csv;

  bool operator==(const DatasetSchema&) const = default;
};

/// Schema and provenance for one of the four public phishing datasets.
struct DatasetPreset {
  std::string name;
  std::string title;
  std::string source_url;
  std::string default_filename;
  DatasetSchema schema;
  std::size_t expected_rows = 0;
  std::size_t expected_features = 0;
  std::size_t expected_phishing = 0;
};

std::span<const DatasetPreset> dataset_presets();

/// Throws ConfigError for unknown names.
const DatasetPreset& dataset_preset(std::string_view name);

Dataset load_csv(const std::string& path, const DatasetSchema& schema);

/// Same as load_csv on in-memory content (file name only used in messages).
Dataset parse_dataset(std::string_view content, const DatasetSchema& schema, const std::string& source_name);

/// Reads a feature file for scoring. Dropped columns and the label column
/// (when present) are removed; with a header, columns are matched to
/// `feature_names` by name, otherwise by position.
Matrix load_feature_rows(const std::string& path, const DatasetSchema& schema,
                         const std::vector<std::string>& feature_names);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
};

/// Per class, round(count * test_fraction) rows go to the test side.
SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// z-score statistics with the population (1/n) denominator.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t dim() const noexcept { return means.size(); }
  bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const Matrix& X);
Matrix apply_scaler(const Scaler& s, const Matrix& X);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  bool operator==(const FoldAssignment&) const = default;
};

FoldAssignment stratified_kfold(const Labels& y, std::size_t k, std::uint64_t seed);
FoldAssignment stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace phishguard
