#include "phishguard/phishguard.h"

#include <cstring>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "phishguard/error.hpp"
#include "phishguard/experiment.hpp"

struct pg_report {
  phishguard::ExperimentReport value;
};
struct pg_model {
  phishguard::PersistedModel value;
};
struct pg_dataset {
  phishguard::Dataset value;
};

namespace {

thread_local std::string t_last_error;

pg_status fail(pg_status code, const std::string& message) {
  t_last_error = message;
  return code;
}

template <class F>
pg_status guarded(F&& fn) {
  try {
    t_last_error.clear();
    fn();
    return PG_OK;
  } catch (const phishguard::Error& e) {
    return fail(static_cast<pg_status>(static_cast<int>(e.kind())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(PG_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PG_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(PG_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(PG_ERR_RUNTIME, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) throw phishguard::InvalidArgument(what);
}

nlohmann::json parse_overrides(const char* overrides_json) {
  if (!overrides_json || !*overrides_json) return nullptr;
  try {
    return nlohmann::json::parse(overrides_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw phishguard::ConfigError(std::string("overrides are not valid JSON: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* pg_version(void) { return "1.0.0"; }

const char* pg_last_error(void) { return t_last_error.c_str(); }

void pg_string_free(char* s) { std::free(s); }

pg_status pg_config_validate(const char* config_path, const char* overrides_json, char** summary) {
  return guarded([&] {
    require(config_path && summary, "pg_config_validate: null argument");
    using namespace phishguard;
    const ExperimentConfig cfg = load_config(config_path, parse_overrides(overrides_json));
    const Dataset ds = load_experiment_dataset(cfg.dataset);
    std::string algos;
    for (Algorithm a : cfg.algorithms) algos += (algos.empty() ? "" : ", ") + std::string(algorithm_name(a));
    std::string text = fmt::format("dataset: {}\nrows: {}\nfeatures: {}\nphishing: {}\nlegitimate: {}\n",
                                   ds.source_name(), ds.n(), ds.d(), ds.count(1), ds.count(0));
    text += fmt::format("seed: {}\ntest_fraction: {}\nk_folds: {}\nalgorithms: {}\n", cfg.seed, cfg.test_fraction,
                        cfg.k_folds, algos);
    text += fmt::format("search: {}\npca: {}\nsmote: {}\n", cfg.search.mode == SearchMode::grid ? "grid" : "random",
                        cfg.featsel.pca ? "on" : "off", cfg.smote.enabled ? "on" : "off");
    *summary = dup_string(text);
  });
}

pg_status pg_experiment_run(const char* config_path, const char* overrides_json, pg_report** out) {
  return guarded([&] {
    require(config_path && out, "pg_experiment_run: null argument");
    const auto cfg = phishguard::load_config(config_path, parse_overrides(overrides_json));
    *out = new pg_report{phishguard::run_experiment(cfg)};
  });
}

pg_status pg_report_load(const char* path, pg_report** out) {
  return guarded([&] {
    require(path && out, "pg_report_load: null argument");
    *out = new pg_report{phishguard::load_report(path)};
  });
}

pg_status pg_report_render(const pg_report* report, const char* format, char** out) {
  return guarded([&] {
    require(report && format && out, "pg_report_render: null argument");
    const std::string f(format);
    if (f == "table") {
      *out = dup_string(phishguard::render_table(report->value));
    } else if (f == "raw") {
      *out = dup_string(phishguard::report_to_json(report->value).dump(2) + "\n");
    } else {
      throw phishguard::InvalidArgument("unknown report format '" + f + "' (expected table or raw)");
    }
  });
}

pg_status pg_report_deterministic_json(const pg_report* report, char** out) {
  return guarded([&] {
    require(report && out, "pg_report_deterministic_json: null argument");
    *out = dup_string(phishguard::deterministic_dump(report->value));
  });
}

pg_status pg_report_compare(const pg_report* const* reports, size_t count, char** out) {
  return guarded([&] {
    require(reports && out && count > 0, "pg_report_compare: no reports");
    std::vector<phishguard::ExperimentReport> rs;
    for (size_t i = 0; i < count; ++i) {
      require(reports[i] != nullptr, "pg_report_compare: null report");
      rs.push_back(reports[i]->value);
    }
    *out = dup_string(phishguard::render_compare(rs));
  });
}

pg_status pg_report_save(const pg_report* report, const char* path) {
  return guarded([&] {
    require(report && path, "pg_report_save: null argument");
    phishguard::write_file_atomic(path, phishguard::report_to_json(report->value).dump(2) + "\n");
  });
}

pg_status pg_report_phishguard_accuracy(const pg_report* report, double* accuracy) {
  return guarded([&] {
    require(report && accuracy, "pg_report_phishguard_accuracy: null argument");
    *accuracy = report->value.phishguard.test.accuracy;
  });
}

void pg_report_free(pg_report* report) { delete report; }

pg_status pg_model_load(const char* path, pg_model** out) {
  return guarded([&] {
    require(path && out, "pg_model_load: null argument");
    *out = new pg_model{phishguard::load_model(path)};
  });
}

pg_status pg_model_input_dim(const pg_model* model, size_t* dim) {
  return guarded([&] {
    require(model && dim, "pg_model_input_dim: null argument");
    *dim = model->value.input_dim();
  });
}

pg_status pg_model_score(const pg_model* model, const double* rows, size_t n_rows, size_t n_cols, double* scores) {
  return guarded([&] {
    require(model && (rows || n_rows == 0) && (scores || n_rows == 0), "pg_model_score: null argument");
    if (n_rows == 0) return;
    phishguard::Matrix X(n_rows, n_cols, std::vector<double>(rows, rows + n_rows * n_cols));
    const auto s = model->value.score(X);
    std::copy(s.begin(), s.end(), scores);
  });
}

pg_status pg_model_predict_csv(const pg_model* model, const char* csv_path, const char* out_path, char** text) {
  return guarded([&] {
    require(model && csv_path && (out_path || text), "pg_model_predict_csv: null argument");
    const phishguard::Matrix X =
        phishguard::load_feature_rows(csv_path, model->value.schema, model->value.feature_names);
    const auto scores = model->value.score(X);
    std::string body = "row,score,label\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
      body += fmt::format("{},{:.17g},{}\n", i, scores[i], scores[i] >= 0.5 ? 1 : 0);
    }
    if (out_path) {
      phishguard::write_file_atomic(out_path, body);
      if (text) *text = nullptr;
    } else {
      *text = dup_string(body);
    }
  });
}

void pg_model_free(pg_model* model) { delete model; }

pg_status pg_dataset_load(const char* config_path, pg_dataset** out) {
  return guarded([&] {
    require(config_path && out, "pg_dataset_load: null argument");
    const auto cfg = phishguard::load_config(config_path);
    *out = new pg_dataset{phishguard::load_experiment_dataset(cfg.dataset)};
  });
}

pg_status pg_dataset_shape(const pg_dataset* ds, size_t* rows, size_t* features, size_t* phishing) {
  return guarded([&] {
    require(ds && rows && features && phishing, "pg_dataset_shape: null argument");
    *rows = ds->value.n();
    *features = ds->value.d();
    *phishing = ds->value.count(1);
  });
}

void pg_dataset_free(pg_dataset* ds) { delete ds; }

}  // extern "C"
