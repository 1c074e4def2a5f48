#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phishguard/phishguard.h"

namespace {

int exit_code(pg_status s) {
  switch (s) {
    case PG_OK: return 0;
    case PG_ERR_CONFIG:
    case PG_ERR_INVALID_ARGUMENT: return 1;
    case PG_ERR_RUNTIME: return 2;
    case PG_ERR_IO: return 3;
  }
  return 2;
}

int report_failure(pg_status s) {
  std::cerr << "phishguard: " << pg_last_error() << "\n";
  return exit_code(s);
}

/// Prints and frees a library-owned string.
void emit(char* text) {
  if (text) std::fputs(text, stdout);
  pg_string_free(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phishing website detection with a rank-driven stacked ensemble"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pg_version()));

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Parse a config and probe its dataset");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> search_mode, output_dir;
  bool no_pca = false, full_k = false, insample = false, hard_labels = false;
  auto* run = app.add_subcommand("run", "Run the full experiment");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-pca", no_pca, "Skip the PCA stage");
  run->add_option("--search", search_mode, "Hyperparameter search mode")->check(CLI::IsMember({"grid", "random"}));
  run->add_flag("--full-k-loop", full_k, "Try every k from 1 to d when choosing k");
  run->add_flag("--insample-stacking", insample, "Train the meta-model on in-sample base scores");
  run->add_flag("--hard-labels", hard_labels, "Use base labels instead of scores as meta-features");
  run->add_option("--output-dir", output_dir, "Override the output directory");

  std::string model_path, csv_path;
  std::optional<std::string> out_path;
  auto* predict = app.add_subcommand("predict", "Score feature rows with a saved model");
  predict->add_option("model", model_path, "Model file")->required();
  predict->add_option("csv", csv_path, "Feature rows (CSV)")->required();
  predict->add_option("--out", out_path, "Write predictions here instead of stdout");

  std::string report_path, format = "table";
  auto* report = app.add_subcommand("report", "Render a stored report");
  report->add_option("report", report_path, "report.json")->required();
  report->add_option("--format", format, "table or raw")->check(CLI::IsMember({"table", "raw"}));

  std::vector<std::string> report_paths;
  auto* compare = app.add_subcommand("compare", "Accuracy table across several reports");
  compare->add_option("reports", report_paths, "report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*validate) {
    char* summary = nullptr;
    const pg_status s = pg_config_validate(config_path.c_str(), nullptr, &summary);
    if (s != PG_OK) return report_failure(s);
    emit(summary);
    return 0;
  }

  if (*run) {
    nlohmann::json overrides = nlohmann::json::object();
    if (seed) overrides["seed"] = *seed;
    if (threads) overrides["threads"] = *threads;
    if (no_pca) overrides["featsel"]["pca"] = false;
    if (full_k) overrides["featsel"]["k_grid"] = "full";
    if (search_mode) overrides["search"]["mode"] = *search_mode;
    if (insample) overrides["stacking"]["scheme"] = "insample";
    if (hard_labels) overrides["stacking"]["meta_features"] = "hard_labels";
    if (output_dir) overrides["output_dir"] = *output_dir;
    pg_report* r = nullptr;
    const pg_status s = pg_experiment_run(config_path.c_str(), overrides.dump().c_str(), &r);
    if (s != PG_OK) return report_failure(s);
    char* table = nullptr;
    const pg_status rs = pg_report_render(r, "table", &table);
    pg_report_free(r);
    if (rs != PG_OK) return report_failure(rs);
    emit(table);
    return 0;
  }

  if (*predict) {
    pg_model* m = nullptr;
    pg_status s = pg_model_load(model_path.c_str(), &m);
    if (s != PG_OK) return report_failure(s);
    char* text = nullptr;
    s = pg_model_predict_csv(m, csv_path.c_str(), out_path ? out_path->c_str() : nullptr, &text);
    pg_model_free(m);
    if (s != PG_OK) return report_failure(s);
    emit(text);
    return 0;
  }

  if (*report) {
    pg_report* r = nullptr;
    pg_status s = pg_report_load(report_path.c_str(), &r);
    if (s != PG_OK) return report_failure(s);
    char* text = nullptr;
    s = pg_report_render(r, format.c_str(), &text);
    pg_report_free(r);
    if (s != PG_OK) return report_failure(s);
    emit(text);
    return 0;
  }

  if (*compare) {
    std::vector<pg_report*> reports;
    pg_status s = PG_OK;
    for (const auto& p : report_paths) {
      pg_report* r = nullptr;
      s = pg_report_load(p.c_str(), &r);
      if (s != PG_OK) break;
      reports.push_back(r);
    }
    char* text = nullptr;
    if (s == PG_OK) s = pg_report_compare(reports.data(), reports.size(), &text);
    for (auto* r : reports) pg_report_free(r);
    if (s != PG_OK) return report_failure(s);
    emit(text);
    return 0;
  }
  return 1;
}
