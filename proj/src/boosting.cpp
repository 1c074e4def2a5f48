#include <cmath>
#include <numeric>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/trees.hpp"
#include "tree_builder.hpp"
#include "tree_policies.hpp"

namespace phishguard {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double mean_log_loss(const std::vector<double>& margin, const Labels& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += softplus(y[i] == 1 ? -margin[i] : margin[i]);
  return s / static_cast<double>(y.size());
}

double base_log_odds(const Labels& y) {
  const double p = static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(y.size());
  const double clamped = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(clamped / (1.0 - clamped));
}

void check_inputs(const Matrix& X, const Labels& y, const char* who) {
  require_binary_labels(X, y, who);
  if (X.rows() < 2) throw InvalidArgument(std::string(who) + ": need at least two rows");
}

nlohmann::json trees_json(const std::vector<Tree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

BoostedTreesModel::BoostedTreesModel(double base_margin, std::vector<Tree> trees, std::vector<double> raw_importance,
                                     std::vector<double> loss_trace)
    : base_margin_(base_margin),
      trees_(std::move(trees)),
      raw_importance_(std::move(raw_importance)),
      loss_trace_(std::move(loss_trace)) {}

std::vector<double> BoostedTreesModel::margin(const Matrix& X) const {
  std::vector<double> out(X.rows(), base_margin_);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    for (const auto& t : trees_) out[i] += t.evaluate(x);
  }
  return out;
}

std::vector<double> BoostedTreesModel::score(const Matrix& X) const {
  auto m = margin(X);
  for (auto& v : m) v = sigmoid(v);
  return m;
}

std::optional<std::vector<double>> BoostedTreesModel::importances() const {
  return normalize_importances(raw_importance_);
}

nlohmann::json BoostedTreesModel::to_json() const {
  return {{"base_margin", base_margin_},
          {"trees", trees_json(trees_)},
          {"raw_importance", raw_importance_},
          {"loss_trace", loss_trace_}};
}

std::shared_ptr<BoostedTreesModel> BoostedTreesModel::from_json(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
  return std::make_shared<BoostedTreesModel>(j.at("base_margin").get<double>(), std::move(trees),
                                             j.at("raw_importance").get<std::vector<double>>(),
                                             j.at("loss_trace").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------

ObliviousBoostModel::ObliviousBoostModel(double base_margin, std::vector<ObliviousTree> trees,
                                         std::vector<double> raw_importance, std::vector<double> loss_trace)
    : base_margin_(base_margin),
      trees_(std::move(trees)),
      raw_importance_(std::move(raw_importance)),
      loss_trace_(std::move(loss_trace)) {}

std::vector<double> ObliviousBoostModel::margin(const Matrix& X) const {
  std::vector<double> out(X.rows(), base_margin_);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    for (const auto& t : trees_) out[i] += t.evaluate(x);
  }
  return out;
}

std::vector<double> ObliviousBoostModel::score(const Matrix& X) const {
  auto m = margin(X);
  for (auto& v : m) v = sigmoid(v);
  return m;
}

std::optional<std::vector<double>> ObliviousBoostModel::importances() const {
  return normalize_importances(raw_importance_);
}

nlohmann::json ObliviousBoostModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    trees.push_back({{"features", t.features}, {"thresholds", t.thresholds}, {"leaf_values", t.leaf_values}});
  }
  return {{"base_margin", base_margin_}, {"trees", trees}, {"raw_importance", raw_importance_}, {"loss_trace", loss_trace_}};
}

std::shared_ptr<ObliviousBoostModel> ObliviousBoostModel::from_json(const nlohmann::json& j) {
  std::vector<ObliviousTree> trees;
  for (const auto& t : j.at("trees")) {
    ObliviousTree o{t.at("features").get<std::vector<std::int32_t>>(), t.at("thresholds").get<std::vector<double>>(),
                    t.at("leaf_values").get<std::vector<double>>()};
    if (o.features.size() != o.thresholds.size() || o.leaf_values.size() != (std::size_t{1} << o.features.size())) {
      throw IoError("malformed oblivious tree payload");
    }
    trees.push_back(std::move(o));
  }
  return std::make_shared<ObliviousBoostModel>(j.at("base_margin").get<double>(), std::move(trees),
                                               j.at("raw_importance").get<std::vector<double>>(),
                                               j.at("loss_trace").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------
// Training loops. The margin F starts at the log-odds of the base rate; each
// round adds one tree fitted to the current logistic gradients.

TrainedModel train_gradient_boosting(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::gradient_boosting) throw InvalidArgument("train_gradient_boosting: wrong spec");
  check_inputs(X, y, "train_gradient_boosting");
  audit::notify_fit("train:gradient_boosting", X);
  const auto rounds = static_cast<std::size_t>(spec.get_int("n_rounds"));
  const double lr = spec.get_double("learning_rate");
  const detail::GrowOptions opt{static_cast<std::size_t>(spec.get_int("max_depth")), 0};
  const auto min_leaf = static_cast<std::size_t>(spec.get_int("min_samples_leaf"));

  const std::size_t n = X.rows();
  const double base = base_log_odds(y);
  std::vector<double> F(n, base), residual(n), hess(n), importance(X.cols(), 0.0);
  std::vector<double> trace{mean_log_loss(F, y)};
  std::vector<Tree> trees;
  if (lr > 0.0) {
    const detail::ColumnOrder order(X);
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(F[i]);
        residual[i] = y[i] - p;
        hess[i] = p * (1.0 - p);
      }
      const detail::NewtonPolicy policy(residual, hess, min_leaf, lr);
      Tree t = detail::grow_tree(X, order, policy, opt, nullptr, importance);
      for (std::size_t i = 0; i < n; ++i) F[i] += t.evaluate(X.row(i));
      trace.push_back(mean_log_loss(F, y));
      trees.push_back(std::move(t));
    }
  }
  return TrainedModel(spec, std::make_shared<BoostedTreesModel>(base, std::move(trees), std::move(importance), std::move(trace)),
                      X.cols());
}

TrainedModel train_xgb_style(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::xgb_style) throw InvalidArgument("train_xgb_style: wrong spec");
  check_inputs(X, y, "train_xgb_style");
  audit::notify_fit("train:xgb_style", X);
  const auto rounds = static_cast<std::size_t>(spec.get_int("n_rounds"));
  const double lr = spec.get_double("learning_rate");
  const double lambda = spec.get_double("lambda");
  const double gamma = spec.get_double("gamma");
  const double mcw = spec.get_double("min_child_weight");
  const detail::GrowOptions opt{static_cast<std::size_t>(spec.get_int("max_depth")), 0};

  const std::size_t n = X.rows();
  const double base = base_log_odds(y);
  std::vector<double> F(n, base), grad(n), hess(n), importance(X.cols(), 0.0);
  std::vector<double> trace{mean_log_loss(F, y)};
  std::vector<Tree> trees;
  const detail::ColumnOrder order(X);
  for (std::size_t r = 0; r < rounds && lr > 0.0; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(F[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    const detail::SecondOrderPolicy policy(grad, hess, lambda, gamma, mcw, lr);
    Tree t = detail::grow_tree(X, order, policy, opt, nullptr, importance);
    for (std::size_t i = 0; i < n; ++i) F[i] += t.evaluate(X.row(i));
    trace.push_back(mean_log_loss(F, y));
    trees.push_back(std::move(t));
  }
  return TrainedModel(spec, std::make_shared<BoostedTreesModel>(base, std::move(trees), std::move(importance), std::move(trace)),
                      X.cols());
}

TrainedModel train_catboost_style(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::catboost_style) throw InvalidArgument("train_catboost_style: wrong spec");
  check_inputs(X, y, "train_catboost_style");
  audit::notify_fit("train:catboost_style", X);
  const auto rounds = static_cast<std::size_t>(spec.get_int("n_rounds"));
  const double lr = spec.get_double("learning_rate");
  const auto depth = static_cast<std::size_t>(spec.get_int("depth"));

  const std::size_t n = X.rows();
  const double base = base_log_odds(y);
  std::vector<double> F(n, base), residual(n), hess(n), importance(X.cols(), 0.0);
  std::vector<double> trace{mean_log_loss(F, y)};
  std::vector<ObliviousTree> trees;
  const detail::ColumnOrder order(X);
  for (std::size_t r = 0; r < rounds && lr > 0.0; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(F[i]);
      residual[i] = y[i] - p;
      hess[i] = p * (1.0 - p);
    }
    const detail::NewtonPolicy policy(residual, hess, 1, lr);
    ObliviousTree t = detail::grow_oblivious(X, order, policy, depth, importance);
    for (std::size_t i = 0; i < n; ++i) F[i] += t.evaluate(X.row(i));
    trace.push_back(mean_log_loss(F, y));
    trees.push_back(std::move(t));
  }
  return TrainedModel(spec,
                      std::make_shared<ObliviousBoostModel>(base, std::move(trees), std::move(importance), std::move(trace)),
                      X.cols());
}

}  // namespace phishguard
