#include <cmath>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/trees.hpp"
#include "tree_builder.hpp"
#include "tree_policies.hpp"

namespace phishguard {

RandomForestModel::RandomForestModel(std::vector<Tree> trees, std::vector<double> raw_importance)
    : trees_(std::move(trees)), raw_importance_(std::move(raw_importance)) {}

std::vector<double> RandomForestModel::score(const Matrix& X) const {
  std::vector<double> out(X.rows(), 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    double s = 0.0;
    for (const auto& t : trees_) s += t.evaluate(x);
    out[i] = s / static_cast<double>(trees_.size());
  }
  return out;
}

std::optional<std::vector<double>> RandomForestModel::importances() const {
  return normalize_importances(raw_importance_);
}

nlohmann::json RandomForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(tree_to_json(t));
  return {{"trees", trees}, {"raw_importance", raw_importance_}};
}

std::shared_ptr<RandomForestModel> RandomForestModel::from_json(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
  if (trees.empty()) throw IoError("forest payload has no trees");
  return std::make_shared<RandomForestModel>(std::move(trees), j.at("raw_importance").get<std::vector<double>>());
}

namespace {

std::size_t resolve_max_features(const ModelSpec& spec, std::size_t d) {
  const auto& v = spec.hyperparameters().at("max_features");
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (*s == "all") return d;
    const double m = *s == "sqrt" ? std::sqrt(static_cast<double>(d)) : std::log2(static_cast<double>(d));
    return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, d);
  }
  return std::min<std::size_t>(static_cast<std::size_t>(std::get<std::int64_t>(v)), d);
}

}  // namespace

TrainedModel train_random_forest(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::random_forest) throw InvalidArgument("train_random_forest: wrong spec");
  require_binary_labels(X, y, "train_random_forest");
  if (X.rows() < 2) throw InvalidArgument("train_random_forest: need at least two rows");
  audit::notify_fit("train:random_forest", X);

  const auto n_trees = static_cast<std::size_t>(spec.get_int("n_trees"));
  const bool bootstrap = spec.get_int("bootstrap") != 0;
  const std::size_t max_features = resolve_max_features(spec, X.cols());
  const detail::GrowOptions opt{static_cast<std::size_t>(spec.get_int("max_depth")),
                                max_features == X.cols() ? 0 : max_features};
  const auto min_leaf = static_cast<std::size_t>(spec.get_int("min_samples_leaf"));
  const detail::ColumnOrder order(X);

  std::vector<Tree> trees(n_trees);
  std::vector<std::vector<double>> imp(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(spec.seed(), "forest_tree", t));
    std::vector<double> weights;
    if (bootstrap) {
      weights.assign(X.rows(), 0.0);
      for (std::size_t b = 0; b < X.rows(); ++b) weights[rng.below(X.rows())] += 1.0;
    }
    const detail::GiniPolicy policy(y, weights, min_leaf, 0.0);
    trees[t] = detail::grow_tree(X, order, policy, opt, &rng, imp[t]);
  });

  std::vector<double> raw(X.cols(), 0.0);
  for (const auto& v : imp) {
    for (std::size_t j = 0; j < raw.size(); ++j) raw[j] += v[j];
  }
  return TrainedModel(spec, std::make_shared<RandomForestModel>(std::move(trees), std::move(raw)), X.cols());
}

}  // namespace phishguard
