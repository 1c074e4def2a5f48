#include "phishguard/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "phishguard/error.hpp"
#include "phishguard/persist.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

using nlohmann::json;

namespace {

std::vector<HyperValue> ints(std::initializer_list<std::int64_t> v) { return {v.begin(), v.end()}; }
std::vector<HyperValue> reals(std::initializer_list<double> v) { return {v.begin(), v.end()}; }

Distribution log_uniform(double lo, double hi) { return {Distribution::Kind::log_uniform, lo, hi, {}}; }
Distribution int_range(double lo, double hi) { return {Distribution::Kind::uniform_int, lo, hi, {}}; }

/// Rejects keys outside `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

bool is_non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, std::size_t lo, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < static_cast<std::int64_t>(lo)) {
    throw ConfigError(where + "." + key + " must be an integer >= " + std::to_string(lo));
  }
  return it->get<std::size_t>();
}

std::string resolve(const std::string& p, const std::string& base_dir) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal().string();
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

DatasetConfig parse_dataset_config(const json& j, const std::string& base_dir) {
  check_keys(j, {"preset", "path", "schema", "synthetic", "verify_counts"}, "dataset");
  DatasetConfig d;
  const int sources = static_cast<int>(j.contains("preset") || j.contains("path") || j.contains("schema")) +
                      static_cast<int>(j.contains("synthetic"));
  if (sources != 1) throw ConfigError("dataset needs exactly one of preset/path or synthetic");
  d.verify_counts = get_or<bool>(j, "verify_counts", false, "dataset");
  if (j.contains("synthetic")) {
    const json& s = j["synthetic"];
    check_keys(s, {"kind", "n", "d", "distance", "flip", "seed"}, "dataset.synthetic");
    SyntheticConfig sc;
    sc.kind = get_or<std::string>(s, "kind", "blobs", "dataset.synthetic");
    if (sc.kind != "blobs" && sc.kind != "noisy_xor") throw ConfigError("dataset.synthetic.kind must be blobs or noisy_xor");
    sc.n = get_count(s, "n", sc.n, 8, "dataset.synthetic");
    sc.d = get_count(s, "d", sc.d, sc.kind == "noisy_xor" ? 2 : 1, "dataset.synthetic");
    sc.distance = get_or<double>(s, "distance", sc.distance, "dataset.synthetic");
    sc.flip = get_or<double>(s, "flip", sc.flip, "dataset.synthetic");
    if (!(sc.flip >= 0 && sc.flip <= 0.5)) throw ConfigError("dataset.synthetic.flip must be in [0, 0.5]");
    if (!s.contains("seed")) throw ConfigError("dataset.synthetic.seed is required");
    sc.seed = get_or<std::uint64_t>(s, "seed", 0, "dataset.synthetic");
    d.synthetic = sc;
    return d;
  }
  if (j.contains("preset")) {
    const auto& preset = dataset_preset(get_or<std::string>(j, "preset", "", "dataset"));
    d.preset = preset.name;
    d.schema = preset.schema;
    if (j.contains("path")) {
      d.path = resolve(get_or<std::string>(j, "path", "", "dataset"), base_dir);
    } else if (const char* dir = std::getenv("PHISHGUARD_DATA_DIR")) {
      d.path = (std::filesystem::path(dir) / preset.default_filename).string();
    } else {
      d.path = resolve("data/" + preset.default_filename, base_dir);
    }
  } else {
    if (!j.contains("path")) throw ConfigError("dataset.path is required without a preset");
    d.path = resolve(get_or<std::string>(j, "path", "", "dataset"), base_dir);
  }
  if (j.contains("schema")) {
    const json& s = j["schema"];
    check_keys(s, {"label_column", "positive", "negative", "delimiter", "has_header", "drop_columns", "format"},
               "dataset.schema");
    json full = schema_to_json(d.schema);
    for (const auto& [k, v] : s.items()) full[k] = v;
    try {
      d.schema = schema_from_json(full);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("dataset.schema: ") + e.what());
    }
  }
  return d;
}

Distribution parse_distribution(const json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) throw ConfigError(where + " must be an object with one distribution key");
  const auto& [kind, v] = *j.items().begin();
  Distribution d;
  if (kind == "choice") {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ".choice must be a non-empty list");
    d.kind = Distribution::Kind::choice;
    for (const auto& c : v) d.choices.push_back(hyper_value_from_json(c, where));
    return d;
  }
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + "." + kind + " must be [lo, hi]");
  }
  d.lo = v[0].get<double>();
  d.hi = v[1].get<double>();
  if (!(d.hi >= d.lo)) throw ConfigError(where + ": hi must be >= lo");
  if (kind == "log_uniform") {
    if (!(d.lo > 0)) throw ConfigError(where + ": log_uniform bounds must be positive");
    d.kind = Distribution::Kind::log_uniform;
  } else if (kind == "uniform") {
    d.kind = Distribution::Kind::uniform;
  } else if (kind == "int") {
    d.kind = Distribution::Kind::uniform_int;
  } else {
    throw ConfigError(where + ": unknown distribution '" + kind + "'");
  }
  return d;
}

json distribution_to_json(const Distribution& d) {
  switch (d.kind) {
    case Distribution::Kind::log_uniform: return {{"log_uniform", {d.lo, d.hi}}};
    case Distribution::Kind::uniform: return {{"uniform", {d.lo, d.hi}}};
    case Distribution::Kind::uniform_int: return {{"int", {d.lo, d.hi}}};
    case Distribution::Kind::choice: {
      json c = json::array();
      for (const auto& v : d.choices) c.push_back(hyper_value_to_json(v));
      return {{"choice", c}};
    }
  }
  return nullptr;
}

}  // namespace

json hyper_value_to_json(const HyperValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

HyperValue hyper_value_from_json(const json& j, const std::string& what) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return std::string("none");
  throw ConfigError(what + ": hyperparameter values must be numbers or strings");
}

ParamGrid default_grid(Algorithm a) {
  switch (a) {
    case Algorithm::svm:
      return {{"C", reals({0.1, 1.0, 10.0})},
              {"kernel", {std::string("linear"), std::string("rbf")}},
              {"gamma", reals({0.01, 0.1, 1.0})}};
    case Algorithm::random_forest:
      return {{"n_trees", ints({100, 300})}, {"max_depth", {std::int64_t{8}, std::int64_t{16}, std::string("none")}}};
    case Algorithm::gradient_boosting:
    case Algorithm::xgb_style:
      return {{"n_rounds", ints({100, 300})}, {"learning_rate", reals({0.05, 0.1, 0.3})}, {"max_depth", ints({3, 6})}};
    case Algorithm::catboost_style:
      return {{"n_rounds", ints({100, 300})}, {"learning_rate", reals({0.05, 0.1, 0.3})}, {"depth", ints({3, 6})}};
    case Algorithm::adaboost:
      return {{"n_estimators", ints({50, 200})}, {"learning_rate", reals({0.5, 1.0})}};
    case Algorithm::decision_tree:
      return {{"max_depth", {std::int64_t{4}, std::int64_t{8}, std::string("none")}}};
  }
  return {};
}

Distributions default_distributions(Algorithm a) {
  switch (a) {
    case Algorithm::svm:
      return {{"C", log_uniform(0.01, 100.0)},
              {"kernel", {Distribution::Kind::choice, 0, 0, {std::string("linear"), std::string("rbf")}}},
              {"gamma", log_uniform(0.001, 1.0)}};
    case Algorithm::random_forest:
      return {{"n_trees", int_range(50, 300)}, {"max_depth", int_range(2, 20)}};
    case Algorithm::gradient_boosting:
    case Algorithm::xgb_style:
      return {{"n_rounds", int_range(50, 300)}, {"learning_rate", log_uniform(0.01, 0.3)}, {"max_depth", int_range(2, 6)}};
    case Algorithm::catboost_style:
      return {{"n_rounds", int_range(50, 300)}, {"learning_rate", log_uniform(0.01, 0.3)}, {"depth", int_range(2, 6)}};
    case Algorithm::adaboost:
      return {{"n_estimators", int_range(25, 200)}, {"learning_rate", log_uniform(0.1, 1.0)}};
    case Algorithm::decision_tree:
      return {{"max_depth", int_range(2, 16)}};
  }
  return {};
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
  check_keys(j, {"dataset", "test_fraction", "k_folds", "seed", "smote", "featsel", "search", "algorithms", "models",
                 "stacking", "output_dir", "threads"},
             "config");
  ExperimentConfig c;
  if (!j.contains("dataset")) throw ConfigError("config.dataset is required");
  c.dataset = parse_dataset_config(j["dataset"], base_dir);
  if (!j.contains("seed") || !is_non_negative_integer(j["seed"])) {
    throw ConfigError("config.seed is required and must be a non-negative integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();
  c.test_fraction = get_or<double>(j, "test_fraction", c.test_fraction, "config");
  if (!(c.test_fraction > 0 && c.test_fraction < 1)) throw ConfigError("config.test_fraction must be in (0, 1)");
  c.k_folds = get_count(j, "k_folds", c.k_folds, 2, "config");
  c.threads = static_cast<int>(get_count(j, "threads", 1, 1, "config"));
  if (j.contains("output_dir")) c.output_dir = resolve(get_or<std::string>(j, "output_dir", "", "config"), base_dir);

  if (j.contains("smote")) {
    const json& s = j["smote"];
    check_keys(s, {"enabled", "k_neighbors", "target_ratio"}, "smote");
    c.smote.enabled = get_or<bool>(s, "enabled", true, "smote");
    c.smote.k_neighbors = get_count(s, "k_neighbors", 5, 1, "smote");
    c.smote.target_ratio = get_or<double>(s, "target_ratio", 1.0, "smote");
    if (!(c.smote.target_ratio > 0 && c.smote.target_ratio <= 1)) throw ConfigError("smote.target_ratio must be in (0, 1]");
  }

  if (j.contains("featsel")) {
    const json& f = j["featsel"];
    check_keys(f, {"k_grid", "pca", "variance_threshold", "rfecv_step", "rfecv_min_features", "surrogate_trees"},
               "featsel");
    if (f.contains("k_grid")) {
      const json& g = f["k_grid"];
      if (g.is_string() && g == "coarse") {
        c.featsel.k_grid = KGridMode::coarse;
      } else if (g.is_string() && g == "full") {
        c.featsel.k_grid = KGridMode::full;
      } else if (g.is_array() && !g.empty()) {
        c.featsel.k_grid = KGridMode::list;
        for (const auto& k : g) {
          if (!is_non_negative_integer(k) || k.get<std::size_t>() < 1) throw ConfigError("featsel.k_grid entries must be >= 1");
          c.featsel.k_list.push_back(k.get<std::size_t>());
        }
      } else {
        throw ConfigError("featsel.k_grid must be \"coarse\", \"full\" or a list of integers");
      }
    }
    c.featsel.pca = get_or<bool>(f, "pca", true, "featsel");
    c.featsel.variance_threshold = get_or<double>(f, "variance_threshold", 0.95, "featsel");
    if (!(c.featsel.variance_threshold > 0 && c.featsel.variance_threshold <= 1)) {
      throw ConfigError("featsel.variance_threshold must be in (0, 1]");
    }
    c.featsel.rfecv_step = get_count(f, "rfecv_step", 1, 1, "featsel");
    c.featsel.rfecv_min_features = get_count(f, "rfecv_min_features", 1, 1, "featsel");
    c.featsel.surrogate_trees = static_cast<std::int64_t>(get_count(f, "surrogate_trees", 200, 1, "featsel"));
  }

  if (j.contains("search")) {
    const json& s = j["search"];
    check_keys(s, {"mode", "random_trials"}, "search");
    const auto mode = get_or<std::string>(s, "mode", "grid", "search");
    if (mode != "grid" && mode != "random") throw ConfigError("search.mode must be grid or random");
    c.search.mode = mode == "grid" ? SearchMode::grid : SearchMode::random;
    c.search.random_trials = get_count(s, "random_trials", 10, 1, "search");
  }

  if (j.contains("algorithms")) {
    if (!j["algorithms"].is_array()) throw ConfigError("config.algorithms must be a list");
    std::set<Algorithm> seen;
    for (const auto& a : j["algorithms"]) {
      if (!a.is_string()) throw ConfigError("config.algorithms entries must be strings");
      const Algorithm alg = parse_algorithm(a.get<std::string>());
      if (!seen.insert(alg).second) throw ConfigError("config.algorithms lists " + a.get<std::string>() + " twice");
      c.algorithms.push_back(alg);
    }
  } else {
    c.algorithms.assign(std::begin(kPipelineAlgorithms), std::end(kPipelineAlgorithms));
  }
  if (c.algorithms.size() < 4) throw ConfigError("config.algorithms needs at least four models for stacking");

  const json models = j.value("models", json::object());
  if (!models.is_object()) throw ConfigError("config.models must be an object");
  for (const auto& [name, v] : models.items()) {
    const Algorithm a = parse_algorithm(name);
    if (std::find(c.algorithms.begin(), c.algorithms.end(), a) == c.algorithms.end()) {
      throw ConfigError("config.models." + name + " configures an algorithm that is not run");
    }
  }
  for (Algorithm a : c.algorithms) {
    const std::string name(algorithm_name(a));
    ModelConfig mc{default_grid(a), default_distributions(a), {}};
    if (models.contains(name)) {
      const json& m = models[name];
      const std::string where = "models." + name;
      check_keys(m, {"grid", "distributions", "selection"}, where);
      if (m.contains("grid")) {
        if (!m["grid"].is_object() || m["grid"].empty()) throw ConfigError(where + ".grid must be a non-empty object");
        mc.grid.clear();
        for (const auto& [param, values] : m["grid"].items()) {
          if (!values.is_array() || values.empty()) {
            throw ConfigError(where + ".grid." + param + " must be a non-empty list");
          }
          for (const auto& v : values) mc.grid[param].push_back(hyper_value_from_json(v, where + ".grid." + param));
        }
      }
      if (m.contains("distributions")) {
        if (!m["distributions"].is_object()) throw ConfigError(where + ".distributions must be an object");
        mc.distributions.clear();
        for (const auto& [param, d] : m["distributions"].items()) {
          mc.distributions[param] = parse_distribution(d, where + ".distributions." + param);
        }
      }
      if (m.contains("selection")) {
        if (!m["selection"].is_object()) throw ConfigError(where + ".selection must be an object");
        for (const auto& [param, v] : m["selection"].items()) {
          mc.selection[param] = hyper_value_from_json(v, where + ".selection." + param);
        }
      }
    }
    // Surface invalid names and values now rather than mid-run.
    (void)expand_grid(a, mc.grid, 0);
    (void)ModelSpec(a, mc.selection);
    (void)sample_specs(a, mc.distributions, 1, 0, 0);
    c.models[a] = std::move(mc);
  }

  if (j.contains("stacking")) {
    const json& s = j["stacking"];
    check_keys(s, {"scheme", "meta_features", "k_folds"}, "stacking");
    const auto scheme = get_or<std::string>(s, "scheme", "oof", "stacking");
    if (scheme != "oof" && scheme != "insample") throw ConfigError("stacking.scheme must be oof or insample");
    c.stacking.scheme = scheme == "oof" ? StackingScheme::out_of_fold : StackingScheme::in_sample;
    const auto meta = get_or<std::string>(s, "meta_features", "scores", "stacking");
    if (meta != "scores" && meta != "hard_labels") throw ConfigError("stacking.meta_features must be scores or hard_labels");
    c.stacking.meta_features = meta == "scores" ? MetaFeatureKind::scores : MetaFeatureKind::hard_labels;
    c.stacking.k_folds = get_count(s, "k_folds", 5, 2, "stacking");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const json& overrides) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw ConfigError("overrides must be a JSON object");
    j.merge_patch(overrides);
  }
  return parse_config(j, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const ExperimentConfig& c) {
  json dataset;
  if (c.dataset.synthetic) {
    const auto& s = *c.dataset.synthetic;
    dataset["synthetic"] = {{"kind", s.kind}, {"n", s.n}, {"d", s.d}, {"seed", s.seed}};
    if (s.kind == "blobs") {
      dataset["synthetic"]["distance"] = s.distance;
    } else {
      dataset["synthetic"]["flip"] = s.flip;
    }
  } else {
    if (c.dataset.preset) dataset["preset"] = *c.dataset.preset;
    dataset["path"] = std::filesystem::path(c.dataset.path).filename().string();
    dataset["schema"] = schema_to_json(c.dataset.schema);
    dataset["verify_counts"] = c.dataset.verify_counts;
  }
  json k_grid;
  switch (c.featsel.k_grid) {
    case KGridMode::coarse: k_grid = "coarse"; break;
    case KGridMode::full: k_grid = "full"; break;
    case KGridMode::list: k_grid = c.featsel.k_list; break;
  }
  json models = json::object();
  for (const auto& [a, mc] : c.models) {
    json grid = json::object();
    for (const auto& [k, vs] : mc.grid) {
      json arr = json::array();
      for (const auto& v : vs) arr.push_back(hyper_value_to_json(v));
      grid[k] = arr;
    }
    json dists = json::object();
    for (const auto& [k, d] : mc.distributions) dists[k] = distribution_to_json(d);
    json sel = json::object();
    for (const auto& [k, v] : mc.selection) sel[k] = hyper_value_to_json(v);
    models[std::string(algorithm_name(a))] = {{"grid", grid}, {"distributions", dists}, {"selection", sel}};
  }
  std::vector<std::string> algorithms;
  for (Algorithm a : c.algorithms) algorithms.emplace_back(algorithm_name(a));
  return {{"dataset", dataset},
          {"test_fraction", c.test_fraction},
          {"k_folds", c.k_folds},
          {"seed", c.seed},
          {"smote", {{"enabled", c.smote.enabled}, {"k_neighbors", c.smote.k_neighbors}, {"target_ratio", c.smote.target_ratio}}},
          {"featsel",
           {{"k_grid", k_grid},
            {"pca", c.featsel.pca},
            {"variance_threshold", c.featsel.variance_threshold},
            {"rfecv_step", c.featsel.rfecv_step},
            {"rfecv_min_features", c.featsel.rfecv_min_features},
            {"surrogate_trees", c.featsel.surrogate_trees}}},
          {"search", {{"mode", c.search.mode == SearchMode::grid ? "grid" : "random"}, {"random_trials", c.search.random_trials}}},
          {"algorithms", algorithms},
          {"models", models},
          {"stacking",
           {{"scheme", c.stacking.scheme == StackingScheme::out_of_fold ? "oof" : "insample"},
            {"meta_features", c.stacking.meta_features == MetaFeatureKind::scores ? "scores" : "hard_labels"},
            {"k_folds", c.stacking.k_folds}}}};
}

std::string config_digest(const ExperimentConfig& c) { return fmt::format("{:016x}", fnv1a(config_to_json(c).dump())); }

}  // namespace phishguard
