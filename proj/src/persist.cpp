#include "phishguard/persist.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phishguard/error.hpp"

namespace phishguard {

using nlohmann::json;

json scaler_to_json(const Scaler& s) { return {{"means", s.means}, {"stds", s.stds}}; }

Scaler scaler_from_json(const json& j) {
  Scaler s{j.at("means").get<std::vector<double>>(), j.at("stds").get<std::vector<double>>()};
  if (s.means.size() != s.stds.size()) throw IoError("malformed scaler");
  return s;
}

json mask_to_json(const SelectionMask& m) {
  return {{"kept", m.kept}, {"input_dim", m.input_dim}, {"stage", m.stage == MaskStage::kbest ? "kbest" : "rfecv"}};
}

SelectionMask mask_from_json(const json& j) {
  SelectionMask m;
  m.kept = j.at("kept").get<std::vector<std::size_t>>();
  m.input_dim = j.at("input_dim").get<std::size_t>();
  m.stage = j.at("stage").get<std::string>() == "kbest" ? MaskStage::kbest : MaskStage::rfecv;
  for (std::size_t i = 0; i < m.kept.size(); ++i) {
    if (m.kept[i] >= m.input_dim || (i > 0 && m.kept[i] <= m.kept[i - 1])) throw IoError("malformed selection mask");
  }
  if (m.kept.empty()) throw IoError("malformed selection mask");
  return m;
}

json pca_to_json(const PcaModel& p) {
  return {{"mean", p.mean},
          {"components", std::vector<double>(p.components.data().begin(), p.components.data().end())},
          {"n_components", p.n_components()},
          {"explained_variance", p.explained_variance},
          {"explained_variance_ratio", p.explained_variance_ratio}};
}

PcaModel pca_from_json(const json& j) {
  PcaModel p;
  p.mean = j.at("mean").get<std::vector<double>>();
  const auto m = j.at("n_components").get<std::size_t>();
  auto flat = j.at("components").get<std::vector<double>>();
  if (flat.size() != m * p.mean.size()) throw IoError("malformed pca payload");
  p.components = Matrix(m, p.mean.size(), std::move(flat));
  p.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  p.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
  return p;
}

json stages_to_json(const FeatureStages& s) {
  return {{"kbest", mask_to_json(s.kbest)},
          {"rfecv", mask_to_json(s.rfecv)},
          {"pca", s.pca ? pca_to_json(*s.pca) : json(nullptr)}};
}

FeatureStages stages_from_json(const json& j) {
  FeatureStages s;
  s.kbest = mask_from_json(j.at("kbest"));
  s.rfecv = mask_from_json(j.at("rfecv"));
  if (!j.at("pca").is_null()) s.pca = pca_from_json(j.at("pca"));
  if (s.rfecv.input_dim != s.kbest.kept.size() || (s.pca && s.pca->input_dim() != s.rfecv.kept.size())) {
    throw IoError("feature stages do not compose");
  }
  return s;
}

json pipeline_to_json(const FittedPipeline& p) {
  return {{"scaler", scaler_to_json(p.scaler)}, {"stages", stages_to_json(p.stages)}};
}

FittedPipeline pipeline_from_json(const json& j) {
  FittedPipeline p{scaler_from_json(j.at("scaler")), stages_from_json(j.at("stages"))};
  if (p.stages.input_dim() != p.scaler.dim()) throw IoError("pipeline stages do not match the scaler");
  return p;
}

json schema_to_json(const DatasetSchema& s) {
  json j;
  if (const auto* name = std::get_if<std::string>(&s.label_column)) {
    j["label_column"] = *name;
  } else {
    j["label_column"] = std::get<std::size_t>(s.label_column);
  }
  j["positive"] = s.positive_raw_value;
  j["negative"] = s.negative_raw_value ? json(*s.negative_raw_value) : json(nullptr);
  j["delimiter"] = std::string(1, s.delimiter);
  j["has_header"] = s.has_header;
  j["drop_columns"] = s.drop_columns;
  j["format"] = s.format == FileFormat::csv ? "csv" : "arff";
  return j;
}

DatasetSchema schema_from_json(const json& j) {
  DatasetSchema s;
  const auto& lc = j.at("label_column");
  if (lc.is_string()) {
    s.label_column = lc.get<std::string>();
  } else {
    s.label_column = lc.get<std::size_t>();
  }
  s.positive_raw_value = j.at("positive").get<std::string>();
  if (!j.at("negative").is_null()) s.negative_raw_value = j.at("negative").get<std::string>();
  const auto delim = j.at("delimiter").get<std::string>();
  if (delim.size() != 1) throw ConfigError("delimiter must be a single character");
  s.delimiter = delim[0];
  s.has_header = j.at("has_header").get<bool>();
  s.drop_columns = j.at("drop_columns").get<std::vector<std::string>>();
  const auto fmt = j.at("format").get<std::string>();
  if (fmt != "csv" && fmt != "arff") throw ConfigError("format must be csv or arff");
  s.format = fmt == "csv" ? FileFormat::csv : FileFormat::arff;
  return s;
}

std::vector<double> PersistedModel::score(const Matrix& X_raw) const {
  require_columns(X_raw, input_dim(), "model input");
  const Matrix Z = pipeline_transform(pipeline, X_raw);
  if (const auto* single = std::get_if<TrainedModel>(&payload)) return single->score(Z);
  return std::get<StackingModel>(payload).score(Z);
}

Labels PersistedModel::predict(const Matrix& X_raw) const {
  const auto s = score(X_raw);
  Labels out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
  return out;
}

json persisted_to_json(const PersistedModel& m) {
  json j = {{"name", m.name},
            {"pipeline", pipeline_to_json(m.pipeline)},
            {"config_digest", m.config_digest},
            {"feature_names", m.feature_names},
            {"schema", schema_to_json(m.schema)}};
  if (const auto* single = std::get_if<TrainedModel>(&m.payload)) {
    j["kind"] = "single";
    j["model"] = single->to_json();
  } else {
    j["kind"] = "stacking";
    j["model"] = std::get<StackingModel>(m.payload).to_json();
  }
  return j;
}

PersistedModel persisted_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    PersistedModel m{j.at("name").get<std::string>(),
                     pipeline_from_json(j.at("pipeline")),
                     kind == "single" ? std::variant<TrainedModel, StackingModel>(TrainedModel::from_json(j.at("model")))
                                      : std::variant<TrainedModel, StackingModel>(StackingModel::from_json(j.at("model"))),
                     j.at("config_digest").get<std::string>(),
                     j.at("feature_names").get<std::vector<std::string>>(),
                     schema_from_json(j.at("schema"))};
    const std::size_t out_dim = m.pipeline.output_dim();
    const std::size_t need = std::holds_alternative<TrainedModel>(m.payload)
                                 ? std::get<TrainedModel>(m.payload).input_dim()
                                 : std::get<StackingModel>(m.payload).input_dim();
    if (need != out_dim) throw IoError("model input width does not match its pipeline");
    if (m.feature_names.size() != m.input_dim()) throw IoError("feature names do not match the pipeline width");
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - off, 1U << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(chunk));
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw IoError("error writing '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot write '" + path + "': " + ec.message());
  }
}

void save_model(const std::string& path, const PersistedModel& m) {
  const std::string payload = persisted_to_json(m).dump();
  char header[64];
  std::snprintf(header, sizeof header, "PGMODEL %d %08x %zu\n", kModelFileVersion, crc32_of(payload), payload.size());
  write_file_atomic(path, std::string(header) + payload);
}

PersistedModel load_model(const std::string& path) {
  const std::string bytes = read_file(path);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos || bytes.compare(0, 8, "PGMODEL ") != 0) {
    throw IoError("'" + path + "' is not a model file");
  }
  std::istringstream header(bytes.substr(8, nl - 8));
  int version = 0;
  std::string crc_hex;
  std::size_t length = 0;
  if (!(header >> version >> crc_hex >> length)) throw IoError("'" + path + "': malformed model header");
  if (version != kModelFileVersion) {
    throw IoError("'" + path + "': unsupported model format version " + std::to_string(version) + " (this build reads " +
                  std::to_string(kModelFileVersion) + ")");
  }
  const std::string_view payload(bytes.data() + nl + 1, bytes.size() - nl - 1);
  if (payload.size() != length) {
    throw IoError("'" + path + "': truncated or padded model file (expected " + std::to_string(length) +
                  " payload bytes, found " + std::to_string(payload.size()) + ")");
  }
  char computed[16];
  std::snprintf(computed, sizeof computed, "%08x", crc32_of(payload));
  if (crc_hex != computed) throw IoError("'" + path + "': checksum mismatch");
  json j;
  try {
    j = json::parse(payload);
  } catch (const json::exception& e) {
    throw IoError("'" + path + "': " + e.what());
  }
  return persisted_from_json(j);
}

}  // namespace phishguard
