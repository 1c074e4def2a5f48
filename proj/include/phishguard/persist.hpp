#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "phishguard/data.hpp"
#include "phishguard/ensemble.hpp"
#include "phishguard/featsel.hpp"
#include "phishguard/learners.hpp"

namespace phishguard {

inline constexpr int kModelFileVersion = 1;

nlohmann::json scaler_to_json(const Scaler& s);
Scaler scaler_from_json(const nlohmann::json& j);
nlohmann::json mask_to_json(const SelectionMask& m);
SelectionMask mask_from_json(const nlohmann::json& j);
nlohmann::json pca_to_json(const PcaModel& p);
PcaModel pca_from_json(const nlohmann::json& j);
nlohmann::json stages_to_json(const FeatureStages& s);
FeatureStages stages_from_json(const nlohmann::json& j);
nlohmann::json pipeline_to_json(const FittedPipeline& p);
FittedPipeline pipeline_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const DatasetSchema& s);
DatasetSchema schema_from_json(const nlohmann::json& j);

/// A model with everything needed to score raw feature rows.
struct PersistedModel {
  std::string name;  // algorithm name or "phishguard"
  FittedPipeline pipeline;
  std::variant<TrainedModel, StackingModel> payload;
  std::string config_digest;
  std::vector<std::string> feature_names;
  DatasetSchema schema;

  std::size_t input_dim() const noexcept { return pipeline.input_dim(); }
  /// Scores raw (unscaled) feature rows.
  std::vector<double> score(const Matrix& X_raw) const;
  Labels predict(const Matrix& X_raw) const;
};

nlohmann::json persisted_to_json(const PersistedModel& m);
PersistedModel persisted_from_json(const nlohmann::json& j);

/// File layout: "PGMODEL <version> <crc32 hex> <payload bytes>\n" then the
/// JSON payload. Written to a temporary file and renamed into place.
void save_model(const std::string& path, const PersistedModel& m);
/// Throws IoError on a missing file, bad header, unsupported version,
/// truncation or checksum mismatch.
PersistedModel load_model(const std::string& path);

std::uint32_t crc32_of(std::string_view bytes);

/// Writes bytes to path via a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

}  // namespace phishguard
