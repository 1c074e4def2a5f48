#include "phishguard/experiment.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>

#include <fmt/format.h>

#include "phishguard/balance.hpp"
#include "phishguard/error.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/rng.hpp"
#include "phishguard/synthetic.hpp"

namespace phishguard {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs fn, prefixing any failure with the stage name.
template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw_error(e.kind(), "stage " + name + ": " + e.what());
  } catch (const std::bad_alloc&) {
    throw RuntimeFailure("stage " + name + ": out of memory");
  }
}

class ThreadScope {
 public:
  explicit ThreadScope(int threads) : saved_(thread_count()) { set_thread_count(threads); }
  ~ThreadScope() { set_thread_count(saved_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int saved_;
};

std::vector<std::size_t> compose(const std::vector<std::size_t>& outer, const std::vector<std::size_t>& inner) {
  std::vector<std::size_t> out;
  for (std::size_t i : inner) out.push_back(outer[i]);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Dataset load_experiment_dataset(const DatasetConfig& c) {
  if (c.synthetic) {
    const auto& s = *c.synthetic;
    return s.kind == "blobs" ? make_blobs(s.n, s.d, s.distance, s.seed) : make_noisy_xor(s.n, s.d, s.flip, s.seed);
  }
  if (!std::filesystem::exists(c.path)) {
    std::string hint;
    if (c.preset) {
      const auto& p = dataset_preset(*c.preset);
      hint = p.source_url.empty() ? " (download it and point dataset.path at it)"
                                  : " (download it from " + p.source_url + ")";
    }
    throw IoError("dataset file '" + c.path + "' not found" + hint);
  }
  Dataset ds = load_csv(c.path, c.schema);
  if (c.preset && c.verify_counts) {
    const auto& p = dataset_preset(*c.preset);
    if (ds.n() != p.expected_rows || ds.d() != p.expected_features || ds.count(1) != p.expected_phishing) {
      throw ConfigError(fmt::format("{}: expected {} rows, {} features, {} phishing; found {}, {}, {}", p.name,
                                    p.expected_rows, p.expected_features, p.expected_phishing, ds.n(), ds.d(),
                                    ds.count(1)));
    }
  }
  return ds;
}

ExperimentResult run_pipeline(const ExperimentConfig& cfg, const ExperimentObserver& observer) {
  ThreadScope threads(cfg.threads);
  const auto t_start = Clock::now();
  json timings = json::object();

  ExperimentResult result;
  const Dataset ds = stage("load", [&] { return load_experiment_dataset(cfg.dataset); });
  timings["load"] = seconds_since(t_start);
  result.feature_names = ds.feature_names();
  result.schema = cfg.dataset.schema;

  const SplitResult split =
      stage("split", [&] { return stratified_split(ds, cfg.test_fraction, derive_seed(cfg.seed, "split")); });
  result.train_indices = split.train_indices;
  result.test_indices = split.test_indices;
  if (observer.on_split) observer.on_split(split);

  auto t0 = Clock::now();
  result.scaler = stage("scale", [&] { return fit_scaler(split.train.features()); });
  const Matrix X_train = apply_scaler(result.scaler, split.train.features());
  const Matrix X_test = apply_scaler(result.scaler, split.test.features());
  const Labels& y_test = split.test.labels();

  Matrix Xb = X_train;
  Labels yb = split.train.labels();
  std::size_t synthetic_rows = 0;
  if (cfg.smote.enabled) {
    SmoteResult sm = stage("smote", [&] {
      return smote(X_train, split.train.labels(),
                   {cfg.smote.k_neighbors, cfg.smote.target_ratio, derive_seed(cfg.seed, "smote")});
    });
    Xb = std::move(sm.X);
    yb = std::move(sm.y);
    synthetic_rows = sm.synthetic_count;
  }
  timings["preprocess"] = seconds_since(t0);

  const FoldAssignment folds =
      stage("folds", [&] { return stratified_kfold(yb, cfg.k_folds, derive_seed(cfg.seed, "cv_folds")); });

  const std::size_t d = Xb.cols();
  std::vector<std::size_t> k_grid;
  switch (cfg.featsel.k_grid) {
    case KGridMode::coarse: k_grid = coarse_k_grid(d); break;
    case KGridMode::full: k_grid = full_k_grid(d); break;
    case KGridMode::list:
      for (std::size_t k : cfg.featsel.k_list) {
        if (k > d) throw ConfigError(fmt::format("featsel.k_grid value {} exceeds the feature count {}", k, d));
      }
      k_grid = cfg.featsel.k_list;
      break;
  }

  // Per-model tracks.
  const std::size_t n_models = cfg.algorithms.size();
  result.tracks.resize(n_models);
  std::vector<ModelReport> reports(n_models);
  std::vector<double> track_seconds(n_models, 0.0);
  parallel_for(n_models, [&](std::size_t t) {
    const auto t_track = Clock::now();
    const Algorithm a = cfg.algorithms[t];
    const std::string name(algorithm_name(a));
    const ModelConfig& mc = cfg.models.at(a);
    const std::uint64_t model_seed = derive_seed(cfg.seed, "model:" + name);
    const ModelSpec selection_spec(a, mc.selection, model_seed);
    ModelReport& rep = reports[t];
    rep.algorithm = a;

    const KChoice kc = stage(name + "/select_k", [&] { return choose_k_by_cv(selection_spec, Xb, yb, folds, k_grid); });
    const Matrix Xk = kc.mask.apply(Xb);

    RfecvOptions ro;
    ro.step = cfg.featsel.rfecv_step;
    ro.min_features = std::min(cfg.featsel.rfecv_min_features, Xk.cols());
    ro.surrogate = default_rfecv_surrogate(derive_seed(model_seed, "surrogate"))
                       .with("n_trees", HyperValue{cfg.featsel.surrogate_trees});
    const RfecvResult rf = stage(name + "/rfecv", [&] { return rfecv(selection_spec, Xk, yb, folds, ro); });
    Matrix Xs = rf.mask.apply(Xk);

    FeatureStages stages{kc.mask, rf.mask, std::nullopt};
    if (cfg.featsel.pca) {
      stages.pca = stage(name + "/pca", [&] { return fit_pca(Xs, cfg.featsel.variance_threshold); });
      Xs = stages.pca->transform(Xs);
    }

    const SearchResult sr = stage(name + "/search", [&] {
      const auto specs = cfg.search.mode == SearchMode::grid
                             ? expand_grid(a, mc.grid, model_seed)
                             : sample_specs(a, mc.distributions, cfg.search.random_trials,
                                            derive_seed(model_seed, "search"), model_seed);
      return grid_search(specs, Xs, yb, folds, Metric::accuracy);
    });
    const Trial& best = sr.trials[sr.best_index];

    TrainedModel model = stage(name + "/fit", [&] { return train(sr.best_spec, Xs, yb); });
    const Labels pred = stage(name + "/test", [&] { return model.predict(stages.transform(X_test)); });

    rep.hyperparameters = sr.best_spec.hyperparameters();
    rep.test_confusion = confusion(y_test, pred);
    rep.test = metrics(rep.test_confusion);
    std::vector<double> f1s;
    for (const auto& cm : best.folds) {
      const MetricsRecord m = metrics(cm);
      rep.cv_fold_accuracy.push_back(m.accuracy);
      f1s.push_back(m.f1);
    }
    rep.cv_accuracy = mean(rep.cv_fold_accuracy);
    rep.cv_accuracy_std = stddev(rep.cv_fold_accuracy);
    rep.cv_f1 = mean(f1s);
    rep.search_trials = sr.trials.size();
    rep.chosen_k = kc.k;
    rep.k_curve = kc.curve;
    rep.kbest_kept = kc.mask.kept;
    rep.rfecv_kept = compose(kc.mask.kept, rf.mask.kept);
    rep.rfecv_curve = rf.curve;
    rep.rfecv_surrogate = rf.used_surrogate;
    if (stages.pca) {
      rep.pca_components = stages.pca->n_components();
      rep.pca_variance_ratio = stages.pca->explained_variance_ratio;
    }

    result.tracks[t] = TrackResult{a, FittedPipeline{result.scaler, std::move(stages)}, std::move(model)};
    track_seconds[t] = seconds_since(t_track);
  });
  for (std::size_t t = 0; t < n_models; ++t) {
    timings["model:" + std::string(algorithm_name(cfg.algorithms[t]))] = track_seconds[t];
  }

  // Ranking by mean CV accuracy on the (balanced) training partition.
  std::vector<RankEntry> entries;
  for (const auto& r : reports) entries.push_back({r.algorithm, r.cv_accuracy, r.cv_f1});
  const auto ranking = rank_models(entries);
  std::vector<RankedModel> ranked;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    for (std::size_t t = 0; t < n_models; ++t) {
      if (cfg.algorithms[t] != ranking[pos].algorithm) continue;
      reports[t].rank = pos + 1;
      const TrackResult& tr = result.tracks[t];
      ranked.push_back({BaseLearner{tr.model->spec(), tr.pipeline.stages}, reports[t].cv_accuracy, tr.model});
    }
  }

  t0 = Clock::now();
  StackingOptions so;
  so.k_folds = cfg.stacking.k_folds;
  so.meta_features = cfg.stacking.meta_features;
  so.scheme = cfg.stacking.scheme;
  so.seed = derive_seed(cfg.seed, "stacking");
  result.phishguard = stage("stacking", [&] { return build_phishguard(ranked, Xb, yb, so, observer.on_meta_fit); });
  const auto pg = stacking_predict(*result.phishguard, X_test);
  timings["stacking"] = seconds_since(t0);

  ExperimentReport& report = result.report;
  report.config = config_to_json(cfg);
  report.config_digest = config_digest(cfg);
  report.dataset = {ds.source_name(),       ds.n(),          ds.d(),         ds.count(1), ds.feature_names(),
                    split.train.n(),        split.test.n(),  Xb.rows(),      synthetic_rows};
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    for (const auto& r : reports) {
      if (r.algorithm == ranking[pos].algorithm) report.models.push_back(r);
    }
  }
  report.phishguard.meta = ranking[0].algorithm;
  for (std::size_t j = 1; j <= 3; ++j) report.phishguard.bases.push_back(ranking[j].algorithm);
  report.phishguard.test_confusion = confusion(y_test, pg.labels);
  report.phishguard.test = metrics(report.phishguard.test_confusion);
  report.phishguard.scheme = so.scheme == StackingScheme::out_of_fold ? "oof" : "insample";
  report.phishguard.meta_features = so.meta_features == MetaFeatureKind::scores ? "scores" : "hard_labels";
  report.phishguard.k_folds = so.k_folds;

  timings["total"] = seconds_since(t_start);
  report.volatile_info = {{"timestamp", utc_timestamp()},
                          {"timings_seconds", timings},
                          {"threads", cfg.threads},
                          {"output_dir", cfg.output_dir}};
  return result;
}

PersistedModel persisted_phishguard(const ExperimentResult& r) {
  const std::size_t d = r.scaler.dim();
  FittedPipeline p{r.scaler,
                   FeatureStages{SelectionMask::identity(d, MaskStage::kbest), SelectionMask::identity(d, MaskStage::rfecv),
                                 std::nullopt}};
  return PersistedModel{"phishguard", std::move(p), *r.phishguard, r.report.config_digest, r.feature_names, r.schema};
}

PersistedModel persisted_track(const ExperimentResult& r, const TrackResult& t) {
  return PersistedModel{std::string(algorithm_name(t.algorithm)), t.pipeline, *t.model, r.report.config_digest,
                        r.feature_names, r.schema};
}

void write_artifacts(const ExperimentResult& r, const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  try {
    std::error_code ec;
    fs::create_directories(fs::path(output_dir) / "models", ec);
    if (ec) throw IoError("cannot create output directory '" + output_dir + "': " + ec.message());
    const auto put = [&](const fs::path& path, const std::string& bytes) {
      write_file_atomic(path.string(), bytes);
      written.push_back(path.string());
    };
    put(fs::path(output_dir) / "report.json", report_to_json(r.report).dump(2) + "\n");
    put(fs::path(output_dir) / "report.txt", render_table(r.report));
    const auto pg_path = fs::path(output_dir) / "phishguard.model";
    save_model(pg_path.string(), persisted_phishguard(r));
    written.push_back(pg_path.string());
    for (const auto& t : r.tracks) {
      const auto path = fs::path(output_dir) / "models" / (std::string(algorithm_name(t.algorithm)) + ".model");
      save_model(path.string(), persisted_track(r, t));
      written.push_back(path.string());
    }
  } catch (...) {
    for (const auto& p : written) std::remove(p.c_str());
    throw;
  }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const ExperimentResult r = run_pipeline(cfg);
  if (!cfg.output_dir.empty()) stage("write", [&] { write_artifacts(r, cfg.output_dir); });
  return r.report;
}

ExperimentReport load_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace phishguard
