#include "phishguard/learners.hpp"

#include <cmath>
#include <numeric>

#include "phishguard/error.hpp"
#include "phishguard/svm.hpp"
#include "phishguard/trees.hpp"

namespace phishguard {

int model_format_version(Algorithm) { return 1; }

TrainedModel::TrainedModel(ModelSpec spec, std::shared_ptr<const Classifier> impl, std::size_t input_dim)
    : spec_(std::move(spec)), impl_(std::move(impl)), input_dim_(input_dim) {
  if (!impl_) throw InvalidArgument("TrainedModel: null implementation");
}

std::vector<double> TrainedModel::score(const Matrix& X) const {
  require_columns(X, input_dim_, "score");
  return impl_->score(X);
}

Labels TrainedModel::predict(const Matrix& X) const {
  const auto s = score(X);
  Labels out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
  return out;
}

std::optional<std::vector<double>> TrainedModel::importances() const { return impl_->importances(); }

namespace {

nlohmann::json hyper_to_json(const Hyperparameters& h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : h) {
    std::visit([&](const auto& x) { j[k] = x; }, v);
  }
  return j;
}

Hyperparameters hyper_from_json(const nlohmann::json& j) {
  Hyperparameters h;
  for (const auto& [k, v] : j.items()) {
    if (v.is_number_integer()) {
      h[k] = v.get<std::int64_t>();
    } else if (v.is_number_float()) {
      h[k] = v.get<double>();
    } else if (v.is_string()) {
      h[k] = v.get<std::string>();
    } else {
      throw IoError("malformed hyperparameter '" + k + "'");
    }
  }
  return h;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
  return {{"algorithm", std::string(algorithm_name(spec_.algorithm()))},
          {"format_version", model_format_version(spec_.algorithm())},
          {"hyperparameters", hyper_to_json(spec_.hyperparameters())},
          {"seed", spec_.seed()},
          {"input_dim", input_dim_},
          {"state", impl_->to_json()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  try {
    const Algorithm a = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.at("format_version").get<int>() != model_format_version(a)) {
      throw IoError("unsupported model format version for " + std::string(algorithm_name(a)));
    }
    ModelSpec spec(a, hyper_from_json(j.at("hyperparameters")), j.at("seed").get<std::uint64_t>());
    const auto dim = j.at("input_dim").get<std::size_t>();
    const auto& state = j.at("state");
    std::shared_ptr<const Classifier> impl;
    switch (a) {
      case Algorithm::decision_tree: impl = DecisionTreeModel::from_json(state); break;
      case Algorithm::random_forest: impl = RandomForestModel::from_json(state); break;
      case Algorithm::gradient_boosting:
      case Algorithm::xgb_style: impl = BoostedTreesModel::from_json(state); break;
      case Algorithm::catboost_style: impl = ObliviousBoostModel::from_json(state); break;
      case Algorithm::adaboost: impl = AdaBoostModel::from_json(state); break;
      case Algorithm::svm: impl = SvmModel::from_json(state); break;
    }
    return TrainedModel(std::move(spec), std::move(impl), dim);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model payload: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed model payload: ") + e.what());
  }
}

TrainedModel train(const ModelSpec& spec, const Matrix& X, const Labels& y) {
  switch (spec.algorithm()) {
    case Algorithm::decision_tree: return train_decision_tree(X, y, spec);
    case Algorithm::random_forest: return train_random_forest(X, y, spec);
    case Algorithm::gradient_boosting: return train_gradient_boosting(X, y, spec);
    case Algorithm::xgb_style: return train_xgb_style(X, y, spec);
    case Algorithm::catboost_style: return train_catboost_style(X, y, spec);
    case Algorithm::adaboost: return train_adaboost(X, y, spec);
    case Algorithm::svm: return train_svm(X, y, spec);
  }
  throw InvalidArgument("train: unknown algorithm");
}

Labels predict(const TrainedModel& m, const Matrix& X) { return m.predict(X); }
std::vector<double> score(const TrainedModel& m, const Matrix& X) { return m.score(X); }
std::optional<std::vector<double>> importances(const TrainedModel& m) { return m.importances(); }

std::optional<std::vector<double>> normalize_importances(std::vector<double> raw) {
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(total > 0.0)) return std::nullopt;
  for (auto& v : raw) v /= total;
  return raw;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace phishguard
