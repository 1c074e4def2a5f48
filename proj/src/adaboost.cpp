#include <cmath>

#include "phishguard/audit.hpp"
#include "phishguard/error.hpp"
#include "phishguard/trees.hpp"
#include "tree_builder.hpp"
#include "tree_policies.hpp"

namespace phishguard {

double adaboost_alpha(double weighted_error, double learning_rate) {
  const double e = std::clamp(weighted_error, 1e-10, 1.0 - 1e-10);
  return learning_rate * 0.5 * std::log((1.0 - e) / e);
}

AdaBoostModel::AdaBoostModel(std::vector<Tree> learners, std::vector<double> alphas, std::vector<double> errors,
                             std::vector<double> raw_importance, Stop stop)
    : learners_(std::move(learners)),
      alphas_(std::move(alphas)),
      errors_(std::move(errors)),
      raw_importance_(std::move(raw_importance)),
      stop_(stop) {}

std::vector<double> AdaBoostModel::margin(const Matrix& X) const {
  std::vector<double> out(X.rows(), 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    for (std::size_t t = 0; t < learners_.size(); ++t) {
      out[i] += alphas_[t] * (learners_[t].evaluate(x) >= 0.5 ? 1.0 : -1.0);
    }
  }
  return out;
}

std::vector<double> AdaBoostModel::score(const Matrix& X) const {
  auto m = margin(X);
  for (auto& v : m) v = sigmoid(v);
  return m;
}

std::optional<std::vector<double>> AdaBoostModel::importances() const { return normalize_importances(raw_importance_); }

nlohmann::json AdaBoostModel::to_json() const {
  nlohmann::json learners = nlohmann::json::array();
  for (const auto& t : learners_) learners.push_back(tree_to_json(t));
  return {{"learners", learners},
          {"alphas", alphas_},
          {"errors", errors_},
          {"raw_importance", raw_importance_},
          {"stop", static_cast<int>(stop_)}};
}

std::shared_ptr<AdaBoostModel> AdaBoostModel::from_json(const nlohmann::json& j) {
  std::vector<Tree> learners;
  for (const auto& t : j.at("learners")) learners.push_back(tree_from_json(t));
  auto alphas = j.at("alphas").get<std::vector<double>>();
  if (alphas.size() != learners.size()) throw IoError("malformed adaboost payload");
  return std::make_shared<AdaBoostModel>(std::move(learners), std::move(alphas), j.at("errors").get<std::vector<double>>(),
                                         j.at("raw_importance").get<std::vector<double>>(),
                                         static_cast<Stop>(j.at("stop").get<int>()));
}

TrainedModel train_adaboost(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::adaboost) throw InvalidArgument("train_adaboost: wrong spec");
  require_binary_labels(X, y, "train_adaboost");
  if (X.rows() < 2) throw InvalidArgument("train_adaboost: need at least two rows");
  audit::notify_fit("train:adaboost", X);

  const auto rounds = static_cast<std::size_t>(spec.get_int("n_estimators"));
  const double lr = spec.get_double("learning_rate");
  const detail::GrowOptions opt{static_cast<std::size_t>(spec.get_int("weak_depth")), 0};
  const std::size_t n = X.rows();
  const detail::ColumnOrder order(X);

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<Tree> learners;
  std::vector<double> alphas, errors, importance(X.cols(), 0.0);
  auto stop = AdaBoostModel::Stop::completed;
  std::vector<int> wrong(n);

  for (std::size_t t = 0; t < rounds; ++t) {
    const detail::GiniPolicy policy(y, w, 1, 0.0);
    std::vector<double> tree_gain;
    Tree tree = detail::grow_tree(X, order, policy, opt, nullptr, tree_gain);

    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int h = tree.evaluate(X.row(i)) >= 0.5 ? 1 : 0;
      wrong[i] = h != y[i];
      err += wrong[i] ? w[i] : 0.0;
      total += w[i];
    }
    err /= total;
    if (err >= 0.5) {
      stop = AdaBoostModel::Stop::weak_learner_failed;
      break;
    }
    const double alpha = adaboost_alpha(err, lr);
    double gain_sum = 0.0;
    for (double g : tree_gain) gain_sum += g;
    if (gain_sum > 0.0) {
      for (std::size_t j = 0; j < importance.size(); ++j) importance[j] += alpha * tree_gain[j] / gain_sum;
    }
    learners.push_back(std::move(tree));
    alphas.push_back(alpha);
    errors.push_back(err);
    if (err <= 0.0) {
      stop = AdaBoostModel::Stop::perfect_learner;
      break;
    }

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(wrong[i] ? alpha : -alpha);
      norm += w[i];
    }
    for (auto& v : w) v /= norm;
  }

  return TrainedModel(spec,
                      std::make_shared<AdaBoostModel>(std::move(learners), std::move(alphas), std::move(errors),
                                                      std::move(importance), stop),
                      X.cols());
}

}  // namespace phishguard
