#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phishguard {

enum class Algorithm {
  svm,
  random_forest,
  xgb_style,
  catboost_style,
  adaboost,
  gradient_boosting,
  decision_tree,
};

/// The six tuned learners, in the fixed order used for report rows and as the
/// final ranking tie-break.
inline constexpr Algorithm kPipelineAlgorithms[] = {
    Algorithm::svm,      Algorithm::random_forest, Algorithm::xgb_style,
    Algorithm::catboost_style, Algorithm::adaboost, Algorithm::gradient_boosting,
};

std::string_view algorithm_name(Algorithm a);
/// Short label used in tables (SVM, RF, XGB, CB, AB, GB, DT).
std::string_view display_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
/// Position in kPipelineAlgorithms; decision_tree sorts last.
int algorithm_order(Algorithm a);

using HyperValue = std::variant<std::int64_t, double, std::string>;
using Hyperparameters = std::map<std::string, HyperValue>;

std::string to_string(const HyperValue& v);

/// Algorithm identifier, validated hyperparameters (defaults filled in) and
/// a seed. Unknown names, wrong kinds and out-of-range values are rejected
/// at construction with ConfigError.
class ModelSpec {
 public:
  ModelSpec() : ModelSpec(Algorithm::decision_tree) {}
  explicit ModelSpec(Algorithm algorithm, Hyperparameters hyperparameters = {}, std::uint64_t seed = 0);

  Algorithm algorithm() const noexcept { return algorithm_; }
  const Hyperparameters& hyperparameters() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

  ModelSpec with_seed(std::uint64_t seed) const;
  ModelSpec with(const std::string& name, HyperValue value) const;

  double get_double(const std::string& name) const;
  std::int64_t get_int(const std::string& name) const;
  std::string get_string(const std::string& name) const;

  /// "algorithm{a=1,b=0.1}" with keys sorted; seed excluded.
  std::string canonical() const;

  bool operator==(const ModelSpec&) const = default;

 private:
  Algorithm algorithm_;
  Hyperparameters params_;
  std::uint64_t seed_ = 0;
};

/// Names of the hyperparameters an algorithm accepts.
std::vector<std::string> hyperparameter_names(Algorithm a);

}  // namespace phishguard
