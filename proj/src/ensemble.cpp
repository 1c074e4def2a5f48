#include "phishguard/ensemble.hpp"

#include "phishguard/error.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/persist.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

Matrix BaseLearner::features(const Matrix& X_scaled) const { return stages ? stages->transform(X_scaled) : X_scaled; }

namespace {

std::vector<double> base_output(const TrainedModel& m, const Matrix& X, MetaFeatureKind kind) {
  auto s = m.score(X);
  if (kind == MetaFeatureKind::hard_labels) {
    for (auto& v : s) v = v >= 0.5 ? 1.0 : 0.0;
  }
  return s;
}

}  // namespace

Matrix oof_meta_features(const std::vector<BaseLearner>& bases, const Matrix& X_scaled, const Labels& y,
                         const FoldAssignment& folds, MetaFeatureKind kind, const MetaObserver& observer) {
  require_binary_labels(X_scaled, y, "oof_meta_features");
  if (folds.fold_of.size() != X_scaled.rows()) throw InvalidArgument("oof_meta_features: folds do not match the data");
  if (bases.empty()) throw InvalidArgument("oof_meta_features: no base learners");
  std::vector<Matrix> inputs;
  for (const auto& b : bases) inputs.push_back(b.features(X_scaled));

  Matrix meta(X_scaled.rows(), bases.size());
  const std::size_t K = folds.k;
  std::vector<std::vector<double>> outputs(bases.size() * K);
  parallel_for(outputs.size(), [&](std::size_t job) {
    const std::size_t j = job / K;
    const std::size_t f = job % K;
    const auto tr = folds.train_indices(f);
    const auto te = folds.test_indices(f);
    if (observer) observer(j, f, tr, te);
    Labels ytr;
    for (std::size_t i : tr) ytr.push_back(y[i]);
    try {
      const TrainedModel m = train(bases[j].spec.with_seed(fold_seed(bases[j].spec.seed(), f)),
                                   inputs[j].select_rows(tr), ytr);
      outputs[job] = base_output(m, inputs[j].select_rows(te), kind);
    } catch (const Error& e) {
      throw RuntimeFailure("meta-features, base " + bases[j].spec.canonical() + " fold " + std::to_string(f) + ": " +
                           e.what());
    }
  });
  for (std::size_t j = 0; j < bases.size(); ++j) {
    for (std::size_t f = 0; f < K; ++f) {
      const auto te = folds.test_indices(f);
      const auto& o = outputs[j * K + f];
      for (std::size_t t = 0; t < te.size(); ++t) meta(te[t], j) = o[t];
    }
  }
  return meta;
}

StackingModel::StackingModel(std::vector<BaseLearner> bases, std::vector<TrainedModel> base_models,
                             TrainedModel meta_model, StackingOptions options, std::vector<Algorithm> ranking)
    : bases_(std::move(bases)),
      base_models_(std::move(base_models)),
      meta_model_(std::move(meta_model)),
      options_(options),
      ranking_(std::move(ranking)) {
  if (bases_.empty() || bases_.size() != base_models_.size()) throw InvalidArgument("StackingModel: base mismatch");
  if (meta_model_.input_dim() != bases_.size()) throw InvalidArgument("StackingModel: meta-model input width");
  input_dim_ = bases_[0].stages ? bases_[0].stages->input_dim() : base_models_[0].input_dim();
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const std::size_t dj = bases_[j].stages ? bases_[j].stages->input_dim() : base_models_[j].input_dim();
    if (dj != input_dim_) throw InvalidArgument("StackingModel: bases disagree on input width");
  }
}

Matrix StackingModel::meta_features(const Matrix& X_scaled) const {
  require_columns(X_scaled, input_dim_, "stacking");
  Matrix meta(X_scaled.rows(), bases_.size());
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const auto out = base_output(base_models_[j], bases_[j].features(X_scaled), options_.meta_features);
    for (std::size_t i = 0; i < out.size(); ++i) meta(i, j) = out[i];
  }
  return meta;
}

std::vector<double> StackingModel::score(const Matrix& X_scaled) const {
  return meta_model_.score(meta_features(X_scaled));
}

Labels StackingModel::predict(const Matrix& X_scaled) const { return meta_model_.predict(meta_features(X_scaled)); }

StackingModel build_phishguard(const std::vector<RankedModel>& ranked, const Matrix& X_scaled, const Labels& y,
                               const StackingOptions& options, const MetaObserver& observer) {
  if (ranked.size() < 4) throw InvalidArgument("build_phishguard: need at least four ranked models");
  require_binary_labels(X_scaled, y, "build_phishguard");
  std::vector<BaseLearner> bases;
  std::vector<Algorithm> ranking;
  for (const auto& r : ranked) ranking.push_back(r.learner.spec.algorithm());
  for (std::size_t j = 1; j <= 3; ++j) bases.push_back(ranked[j].learner);

  std::vector<TrainedModel> base_models;
  for (std::size_t j = 1; j <= 3; ++j) {
    if (ranked[j].fitted) {
      base_models.push_back(*ranked[j].fitted);
    } else {
      base_models.push_back(train(ranked[j].learner.spec, ranked[j].learner.features(X_scaled), y));
    }
  }

  Matrix meta;
  if (options.scheme == StackingScheme::out_of_fold) {
    const FoldAssignment folds = stratified_kfold(y, options.k_folds, derive_seed(options.seed, "stacking_folds"));
    meta = oof_meta_features(bases, X_scaled, y, folds, options.meta_features, observer);
  } else {
    meta = Matrix(X_scaled.rows(), bases.size());
    for (std::size_t j = 0; j < bases.size(); ++j) {
      const auto out = base_output(base_models[j], bases[j].features(X_scaled), options.meta_features);
      for (std::size_t i = 0; i < out.size(); ++i) meta(i, j) = out[i];
    }
  }
  const ModelSpec meta_spec = ranked[0].learner.spec.with_seed(derive_seed(options.seed, "meta_model"));
  TrainedModel meta_model = train(meta_spec, meta, y);
  return StackingModel(std::move(bases), std::move(base_models), std::move(meta_model), options, std::move(ranking));
}

StackingPrediction stacking_predict(const StackingModel& m, const Matrix& X_scaled) {
  StackingPrediction p;
  p.scores = m.score(X_scaled);
  p.labels.resize(p.scores.size());
  for (std::size_t i = 0; i < p.scores.size(); ++i) p.labels[i] = p.scores[i] >= 0.5 ? 1 : 0;
  return p;
}

nlohmann::json StackingModel::to_json() const {
  nlohmann::json bases = nlohmann::json::array();
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    bases.push_back({{"stages", bases_[j].stages ? stages_to_json(*bases_[j].stages) : nlohmann::json(nullptr)},
                     {"model", base_models_[j].to_json()}});
  }
  std::vector<std::string> ranking;
  for (Algorithm a : ranking_) ranking.emplace_back(algorithm_name(a));
  return {{"bases", bases},
          {"meta_model", meta_model_.to_json()},
          {"ranking", ranking},
          {"k_folds", options_.k_folds},
          {"meta_features", options_.meta_features == MetaFeatureKind::scores ? "scores" : "hard_labels"},
          {"scheme", options_.scheme == StackingScheme::out_of_fold ? "oof" : "insample"},
          {"seed", options_.seed}};
}

StackingModel StackingModel::from_json(const nlohmann::json& j) {
  try {
    std::vector<BaseLearner> bases;
    std::vector<TrainedModel> models;
    for (const auto& b : j.at("bases")) {
      TrainedModel m = TrainedModel::from_json(b.at("model"));
      std::optional<FeatureStages> stages;
      if (!b.at("stages").is_null()) stages = stages_from_json(b.at("stages"));
      bases.push_back({m.spec(), stages});
      models.push_back(std::move(m));
    }
    StackingOptions options;
    options.k_folds = j.at("k_folds").get<std::size_t>();
    options.meta_features =
        j.at("meta_features").get<std::string>() == "scores" ? MetaFeatureKind::scores : MetaFeatureKind::hard_labels;
    options.scheme = j.at("scheme").get<std::string>() == "oof" ? StackingScheme::out_of_fold : StackingScheme::in_sample;
    options.seed = j.at("seed").get<std::uint64_t>();
    std::vector<Algorithm> ranking;
    for (const auto& r : j.at("ranking")) ranking.push_back(parse_algorithm(r.get<std::string>()));
    return StackingModel(std::move(bases), std::move(models), TrainedModel::from_json(j.at("meta_model")), options,
                         std::move(ranking));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed stacking payload: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("malformed stacking payload: ") + e.what());
  }
}

}  // namespace phishguard
