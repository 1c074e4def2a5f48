#include "phishguard/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "phishguard/config.hpp"
#include "phishguard/error.hpp"

namespace phishguard {

using nlohmann::json;

const ModelReport* ExperimentReport::find(Algorithm a) const {
  for (const auto& m : models) {
    if (m.algorithm == a) return &m;
  }
  return nullptr;
}

bool ExperimentReport::operator==(const ExperimentReport& o) const {
  return format_version == o.format_version && config == o.config && config_digest == o.config_digest &&
         dataset == o.dataset && models == o.models && phishguard == o.phishguard && volatile_info == o.volatile_info;
}

namespace {

json metrics_json(const MetricsRecord& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}
MetricsRecord metrics_from(const json& j) {
  return {j.at("accuracy").get<double>(), j.at("precision").get<double>(), j.at("recall").get<double>(),
          j.at("f1").get<double>()};
}
json cm_json(const ConfusionMatrix& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}; }
ConfusionMatrix cm_from(const json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("tn").get<std::size_t>(),
          j.at("fn").get<std::size_t>()};
}
json curve_json(const std::vector<CurvePoint>& c) {
  json a = json::array();
  for (const auto& p : c) a.push_back({{"size", p.size}, {"mean_accuracy", p.mean_accuracy}});
  return a;
}
std::vector<CurvePoint> curve_from(const json& j) {
  std::vector<CurvePoint> c;
  for (const auto& p : j) c.push_back({p.at("size").get<std::size_t>(), p.at("mean_accuracy").get<double>()});
  return c;
}

}  // namespace

json report_to_json(const ExperimentReport& r) {
  json models = json::array();
  for (const auto& m : r.models) {
    json hp = json::object();
    for (const auto& [k, v] : m.hyperparameters) hp[k] = hyper_value_to_json(v);
    models.push_back({{"algorithm", std::string(algorithm_name(m.algorithm))},
                      {"display_name", std::string(display_name(m.algorithm))},
                      {"rank", m.rank},
                      {"hyperparameters", hp},
                      {"test", metrics_json(m.test)},
                      {"test_confusion", cm_json(m.test_confusion)},
                      {"cv",
                       {{"fold_accuracy", m.cv_fold_accuracy},
                        {"accuracy", m.cv_accuracy},
                        {"accuracy_std", m.cv_accuracy_std},
                        {"f1", m.cv_f1},
                        {"search_trials", m.search_trials}}},
                      {"kbest", {{"k", m.chosen_k}, {"curve", curve_json(m.k_curve)}, {"kept", m.kbest_kept}}},
                      {"rfecv",
                       {{"size", m.rfecv_kept.size()},
                        {"kept", m.rfecv_kept},
                        {"curve", curve_json(m.rfecv_curve)},
                        {"surrogate", m.rfecv_surrogate}}},
                      {"pca",
                       {{"components", m.pca_components ? json(*m.pca_components) : json(nullptr)},
                        {"variance_ratio", m.pca_variance_ratio}}}});
  }
  std::vector<std::string> bases;
  for (Algorithm a : r.phishguard.bases) bases.emplace_back(algorithm_name(a));
  std::vector<std::string> ranking;
  for (const auto& m : r.models) ranking.emplace_back(algorithm_name(m.algorithm));
  return {{"format_version", r.format_version},
          {"config", r.config},
          {"config_digest", r.config_digest},
          {"dataset",
           {{"source", r.dataset.source},
            {"n", r.dataset.n},
            {"d", r.dataset.d},
            {"n_phishing", r.dataset.n_phishing},
            {"feature_names", r.dataset.feature_names},
            {"train_rows", r.dataset.train_rows},
            {"test_rows", r.dataset.test_rows},
            {"train_rows_balanced", r.dataset.train_rows_balanced},
            {"synthetic_rows", r.dataset.synthetic_rows}}},
          {"ranking", ranking},
          {"models", models},
          {"phishguard",
           {{"meta", std::string(algorithm_name(r.phishguard.meta))},
            {"bases", bases},
            {"test", metrics_json(r.phishguard.test)},
            {"test_confusion", cm_json(r.phishguard.test_confusion)},
            {"scheme", r.phishguard.scheme},
            {"meta_features", r.phishguard.meta_features},
            {"k_folds", r.phishguard.k_folds}}},
          {"volatile", r.volatile_info}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    ExperimentReport r;
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion) {
      throw IoError("unsupported report format version " + std::to_string(r.format_version));
    }
    r.config = j.at("config");
    r.config_digest = j.at("config_digest").get<std::string>();
    const json& d = j.at("dataset");
    r.dataset = {d.at("source").get<std::string>(),
                 d.at("n").get<std::size_t>(),
                 d.at("d").get<std::size_t>(),
                 d.at("n_phishing").get<std::size_t>(),
                 d.at("feature_names").get<std::vector<std::string>>(),
                 d.at("train_rows").get<std::size_t>(),
                 d.at("test_rows").get<std::size_t>(),
                 d.at("train_rows_balanced").get<std::size_t>(),
                 d.at("synthetic_rows").get<std::size_t>()};
    for (const auto& m : j.at("models")) {
      ModelReport mr;
      mr.algorithm = parse_algorithm(m.at("algorithm").get<std::string>());
      for (const auto& [k, v] : m.at("hyperparameters").items()) mr.hyperparameters[k] = hyper_value_from_json(v, k);
      mr.rank = m.at("rank").get<std::size_t>();
      mr.test = metrics_from(m.at("test"));
      mr.test_confusion = cm_from(m.at("test_confusion"));
      const json& cv = m.at("cv");
      mr.cv_fold_accuracy = cv.at("fold_accuracy").get<std::vector<double>>();
      mr.cv_accuracy = cv.at("accuracy").get<double>();
      mr.cv_accuracy_std = cv.at("accuracy_std").get<double>();
      mr.cv_f1 = cv.at("f1").get<double>();
      mr.search_trials = cv.at("search_trials").get<std::size_t>();
      mr.chosen_k = m.at("kbest").at("k").get<std::size_t>();
      mr.k_curve = curve_from(m.at("kbest").at("curve"));
      mr.kbest_kept = m.at("kbest").at("kept").get<std::vector<std::size_t>>();
      mr.rfecv_kept = m.at("rfecv").at("kept").get<std::vector<std::size_t>>();
      mr.rfecv_curve = curve_from(m.at("rfecv").at("curve"));
      mr.rfecv_surrogate = m.at("rfecv").at("surrogate").get<bool>();
      const json& pc = m.at("pca").at("components");
      if (!pc.is_null()) mr.pca_components = pc.get<std::size_t>();
      mr.pca_variance_ratio = m.at("pca").at("variance_ratio").get<std::vector<double>>();
      r.models.push_back(std::move(mr));
    }
    const json& p = j.at("phishguard");
    r.phishguard.meta = parse_algorithm(p.at("meta").get<std::string>());
    for (const auto& b : p.at("bases")) r.phishguard.bases.push_back(parse_algorithm(b.get<std::string>()));
    r.phishguard.test = metrics_from(p.at("test"));
    r.phishguard.test_confusion = cm_from(p.at("test_confusion"));
    r.phishguard.scheme = p.at("scheme").get<std::string>();
    r.phishguard.meta_features = p.at("meta_features").get<std::string>();
    r.phishguard.k_folds = p.at("k_folds").get<std::size_t>();
    r.volatile_info = j.value("volatile", json::object());
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string deterministic_dump(const ExperimentReport& r) {
  json j = report_to_json(r);
  j.erase("volatile");
  return j.dump(2);
}

std::string format_percent(double value) {
  const auto cents = static_cast<long long>(std::floor(value * 10000.0 + 0.5 + 1e-9));
  return fmt::format("{}.{:02}", cents / 100, cents % 100);
}

std::string render_table(const ExperimentReport& r) {
  std::string out = fmt::format("Dataset: {} (n={}, d={}, phishing={}; train={}, test={})\n", r.dataset.source,
                                r.dataset.n, r.dataset.d, r.dataset.n_phishing, r.dataset.train_rows,
                                r.dataset.test_rows);
  out += fmt::format("{:<6}{:<12}{:>8}{:>8}{:>8}{:>8}\n", "Rank", "Model", "Acc.", "Prec.", "Rec.", "F1");
  for (const auto& m : r.models) {
    out += fmt::format("{:<6}{:<12}{:>8}{:>8}{:>8}{:>8}\n", m.rank, display_name(m.algorithm),
                       format_percent(m.test.accuracy), format_percent(m.test.precision),
                       format_percent(m.test.recall), format_percent(m.test.f1));
  }
  const auto& p = r.phishguard;
  out += fmt::format("{:<6}{:<12}{:>8}{:>8}{:>8}{:>8}\n", "-", "PhishGuard", format_percent(p.test.accuracy),
                     format_percent(p.test.precision), format_percent(p.test.recall), format_percent(p.test.f1));
  std::string bases;
  for (Algorithm a : p.bases) bases += (bases.empty() ? "" : ", ") + std::string(display_name(a));
  out += fmt::format("PhishGuard: meta={} bases={} ({}, {} meta-features)\n", display_name(p.meta), bases, p.scheme,
                     p.meta_features);
  return out;
}

std::string render_compare(const std::vector<ExperimentReport>& reports) {
  if (reports.empty()) throw InvalidArgument("compare: no reports");
  std::string out = fmt::format("{:<12}", "Model");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += fmt::format("{:>24}", reports[i].dataset.source.substr(0, 22));
  }
  out += "\n";
  for (Algorithm a : kPipelineAlgorithms) {
    std::string row = fmt::format("{:<12}", display_name(a));
    bool any = false;
    for (const auto& r : reports) {
      const ModelReport* m = r.find(a);
      any = any || m;
      row += fmt::format("{:>24}", m ? format_percent(m->test.accuracy) : std::string("-"));
    }
    if (any) out += row + "\n";
  }
  out += fmt::format("{:<12}", "PhishGuard");
  for (const auto& r : reports) out += fmt::format("{:>24}", format_percent(r.phishguard.test.accuracy));
  return out + "\n";
}

}  // namespace phishguard
