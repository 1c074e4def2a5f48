#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phishguard/config.hpp"
#include "phishguard/persist.hpp"
#include "phishguard/report.hpp"

namespace phishguard {

/// Hooks for instrumentation; all optional.
struct ExperimentObserver {
  std::function<void(const SplitResult&)> on_split;
  MetaObserver on_meta_fit;
};

struct TrackResult {
  Algorithm algorithm = Algorithm::svm;
  FittedPipeline pipeline;
  std::optional<TrainedModel> model;
};

struct ExperimentResult {
  ExperimentReport report;
  std::vector<TrackResult> tracks;  // in algorithm config order
  std::optional<StackingModel> phishguard;
  Scaler scaler;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<std::string> feature_names;
  DatasetSchema schema;
};

Dataset load_experiment_dataset(const DatasetConfig& c);

/// Runs the whole pipeline in memory; writes nothing.
ExperimentResult run_pipeline(const ExperimentConfig& cfg, const ExperimentObserver& observer = {});

/// run_pipeline, then writes report.json, report.txt, phishguard.model and
/// models/<algorithm>.model into cfg.output_dir when it is set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

PersistedModel persisted_phishguard(const ExperimentResult& r);
PersistedModel persisted_track(const ExperimentResult& r, const TrackResult& t);

/// Writes all artifacts; files already written are removed if a later one fails.
void write_artifacts(const ExperimentResult& r, const std::string& output_dir);

ExperimentReport load_report(const std::string& path);

}  // namespace phishguard
