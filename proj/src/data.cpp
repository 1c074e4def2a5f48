#include "phishguard/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "phishguard/audit.hpp"
#include "phishguard/csv.hpp"
#include "phishguard/error.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Matrix features, Labels labels, std::vector<std::string> feature_names, std::string source_name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      source_name_(std::move(source_name)) {
  if (features_.cols() == 0) throw InvalidArgument("dataset needs at least one feature");
  if (features_.rows() < 2) throw InvalidArgument("dataset needs at least two rows");
  require_binary_labels(features_, labels_, "dataset");
  if (feature_names_.size() != features_.cols()) {
    throw InvalidArgument("dataset has " + std::to_string(features_.cols()) + " columns but " +
                          std::to_string(feature_names_.size()) + " feature names");
  }
  std::set<std::string> unique(feature_names_.begin(), feature_names_.end());
  if (unique.size() != feature_names_.size()) throw InvalidArgument("duplicate feature names in dataset");
  for (double v : features_.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("dataset contains a non-finite feature value");
  }
  if (count(0) == 0 || count(1) == 0) throw InvalidArgument("dataset must contain both classes");
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Labels y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(labels_.at(r));
  return Dataset(features_.select_rows(rows), std::move(y), feature_names_, source_name_);
}

// ---------------------------------------------------------------------------
// Presets

namespace {

DatasetSchema make_schema(std::string label, std::string positive, std::string negative,
                          std::vector<std::string> drop, FileFormat format = FileFormat::csv) {
  DatasetSchema s;
  s.label_column = std::move(label);
  s.positive_raw_value = std::move(positive);
  s.negative_raw_value = std::move(negative);
  s.drop_columns = std::move(drop);
  s.format = format;
  return s;
}

const std::vector<DatasetPreset>& preset_table() {
  static const std::vector<DatasetPreset> presets = {
      {"dataset1", "Phishing Dataset for Machine Learning: Feature Evaluation (Tan, 2018)",
       "https://data.mendeley.com/datasets/h3cgnj8hft/1", "Phishing_Legitimate_full.csv",
       make_schema("CLASS_LABEL", "1", "0", {"id"}), 10000, 48, 5000},
      // UCI encodes Result as -1/1; -1 matches the 4,898 phishing sites.
      {"dataset2", "Phishing Websites (UCI)", "https://archive.ics.uci.edu/dataset/327/phishing+websites",
       "Training Dataset.arff", make_schema("Result", "-1", "1", {}, FileFormat::arff), 11055, 30, 4898},
      {"dataset3", "Web Page Phishing Detection (Hannousse and Yahiouche, 2021)",
       "https://data.mendeley.com/datasets/c2gw7fy2j4/3", "dataset_phishing.csv",
       make_schema("status", "phishing", "legitimate", {"url"}), 11430, 87, 5715},
      {"dataset4", "PhishStorm phishing/legitimate URL dataset (Marchal et al., 2014)", "", "urlset.csv",
       make_schema("label", "1", "0", {"domain"}), 96018, 12, 48009},
  };
  return presets;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(std::string_view token) {
  std::string t = trim(token);
  std::string_view v = t;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return out;
}

bool label_matches(std::string_view raw, std::string_view expected) {
  const std::string a = trim(raw);
  const std::string b = trim(expected);
  if (a == b) return true;
  const auto na = parse_number(a);
  const auto nb = parse_number(b);
  return na && nb && *na == *nb;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

struct Table {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
  std::size_t first_data_line = 1;
};

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

Table read_table(std::string_view content, const DatasetSchema& schema) {
  Table t;
  if (schema.format == FileFormat::arff) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      auto end = content.find('\n', pos);
      if (end == std::string_view::npos) end = content.size();
      std::string line = trim(content.substr(pos, end - pos));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      pos = end + 1;
      ++line_no;
      if (line.empty() || line[0] == '%') continue;
      std::string lower = line;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      if (lower.rfind("@attribute", 0) == 0) {
        std::istringstream ls(line.substr(10));
        std::string name;
        ls >> std::ws;
        if (ls.peek() == '\'' || ls.peek() == '"') {
          const char q = static_cast<char>(ls.get());
          std::getline(ls, name, q);
        } else {
          ls >> name;
        }
        t.header.push_back(name);
      } else if (lower.rfind("@data", 0) == 0) {
        t.rows = parse_csv(content.substr(std::min(pos, content.size())), schema.delimiter);
        t.first_data_line = line_no + 1;
        return t;
      }
    }
    throw ConfigError("ARFF file has no @data section");
  }

  t.rows = parse_csv(content, schema.delimiter);
  if (schema.has_header) {
    if (t.rows.empty()) throw ConfigError("file is empty");
    for (auto& h : t.rows.front()) t.header.push_back(unquote(trim(h)));
    t.rows.erase(t.rows.begin());
    t.first_data_line = 2;
  } else {
    const std::size_t width = t.rows.empty() ? 0 : t.rows.front().size();
    for (std::size_t j = 0; j < width; ++j) t.header.push_back("col" + std::to_string(j));
  }
  return t;
}

std::size_t resolve_column(const Table& t, const std::variant<std::string, std::size_t>& col, const char* what) {
  if (const auto* idx = std::get_if<std::size_t>(&col)) {
    if (*idx >= t.header.size()) {
      throw ConfigError(std::string(what) + " index " + std::to_string(*idx) + " out of range");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(col);
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw ConfigError(std::string(what) + " '" + name + "' not found");
  return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

std::span<const DatasetPreset> dataset_presets() { return preset_table(); }

const DatasetPreset& dataset_preset(std::string_view name) {
  for (const auto& p : preset_table()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown dataset preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Loading

Dataset parse_dataset(std::string_view content, const DatasetSchema& schema, const std::string& source_name) {
  const Table t = read_table(content, schema);
  const std::size_t label_idx = resolve_column(t, schema.label_column, "label column");

  std::vector<bool> keep(t.header.size(), true);
  keep[label_idx] = false;
  for (const auto& name : schema.drop_columns) {
    keep[resolve_column(t, name, "drop column")] = false;
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (keep[j]) {
      feature_cols.push_back(j);
      names.push_back(t.header[j]);
    }
  }
  if (feature_cols.empty()) throw ConfigError(source_name + ": no feature columns remain");

  Matrix X(t.rows.size(), feature_cols.size());
  Labels y(t.rows.size());
  std::string negative_seen;
  bool positive_seen = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = t.first_data_line + i;
    if (row.size() != t.header.size()) {
      throw ConfigError(source_name + ": row " + std::to_string(i + 1) + " (line " + std::to_string(line) +
                        ") has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(t.header.size()));
    }
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const std::string& cell = row[feature_cols[j]];
      const auto v = parse_number(cell);
      const std::string where = "row " + std::to_string(i + 1) + " (line " + std::to_string(line) + "), column '" +
                                names[j] + "'";
      if (trim(cell).empty()) throw ConfigError(source_name + ": missing value at " + where);
      if (!v) throw ConfigError(source_name + ": non-numeric value '" + trim(cell) + "' at " + where);
      if (!std::isfinite(*v)) throw ConfigError(source_name + ": non-finite value at " + where);
      X(i, j) = *v;
    }
    const std::string& raw = row[label_idx];
    if (label_matches(raw, schema.positive_raw_value)) {
      y[i] = 1;
      positive_seen = true;
    } else {
      const std::string token = trim(raw);
      if (schema.negative_raw_value && !label_matches(token, *schema.negative_raw_value)) {
        throw ConfigError(source_name + ": unexpected label '" + token + "' at row " + std::to_string(i + 1));
      }
      if (!schema.negative_raw_value) {
        if (negative_seen.empty()) {
          negative_seen = token;
        } else if (!label_matches(token, negative_seen)) {
          throw ConfigError(source_name + ": more than two label values ('" + negative_seen + "', '" + token +
                            "', and the positive value)");
        }
      }
      y[i] = 0;
    }
  }
  if (t.rows.size() < 4) throw ConfigError(source_name + ": need at least 4 rows, found " + std::to_string(t.rows.size()));
  if (!positive_seen) {
    throw ConfigError(source_name + ": positive label value '" + schema.positive_raw_value + "' never appears");
  }
  if (std::find(y.begin(), y.end(), 0) == y.end()) throw ConfigError(source_name + ": dataset has a single class");
  return Dataset(std::move(X), std::move(y), std::move(names), source_name);
}

Dataset load_csv(const std::string& path, const DatasetSchema& schema) {
  const std::string content = read_file(path);
  auto slash = path.find_last_of('/');
  return parse_dataset(content, schema, slash == std::string::npos ? path : path.substr(slash + 1));
}

Matrix load_feature_rows(const std::string& path, const DatasetSchema& schema,
                         const std::vector<std::string>& feature_names) {
  const std::string content = read_file(path);
  const Table t = read_table(content, schema);
  std::vector<std::size_t> cols;
  if (schema.has_header || schema.format == FileFormat::arff) {
    for (const auto& name : feature_names) {
      auto it = std::find(t.header.begin(), t.header.end(), name);
      if (it == t.header.end()) throw ConfigError(path + ": feature column '" + name + "' missing");
      cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
    }
  } else if (t.header.size() == feature_names.size()) {
    cols.resize(feature_names.size());
    std::iota(cols.begin(), cols.end(), 0);
  } else {
    std::vector<bool> keep(t.header.size(), true);
    if (const auto* idx = std::get_if<std::size_t>(&schema.label_column); idx && *idx < keep.size()) keep[*idx] = false;
    for (const auto& name : schema.drop_columns) keep[resolve_column(t, name, "drop column")] = false;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      if (keep[j]) cols.push_back(j);
    }
    if (cols.size() != feature_names.size()) {
      throw ConfigError(path + ": expected " + std::to_string(feature_names.size()) + " feature columns, found " +
                        std::to_string(cols.size()));
    }
  }

  Matrix X(t.rows.size(), cols.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() != t.header.size()) {
      throw ConfigError(path + ": row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) + " cells");
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto v = parse_number(row[cols[j]]);
      if (!v || !std::isfinite(*v)) {
        throw ConfigError(path + ": invalid value '" + trim(row[cols[j]]) + "' at row " + std::to_string(i + 1) +
                          ", column '" + feature_names[j] + "'");
      }
      X(i, j) = *v;
    }
  }
  return X;
}

// ---------------------------------------------------------------------------
// Splitting

SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie in (0, 1)");
  }
  Rng rng(derive_seed(seed, "stratified_split"));
  std::vector<bool> in_test(ds.n(), false);
  for (int c = 0; c <= 1; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.labels()[i] == c) members.push_back(i);
    }
    if (members.size() < 2) throw InvalidArgument("stratified_split: class " + std::to_string(c) + " has fewer than 2 rows");
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    if (n_test == 0 || n_test >= members.size()) {
      throw InvalidArgument("stratified_split: test_fraction " + std::to_string(test_fraction) + " leaves class " +
                            std::to_string(c) + " empty on one side");
    }
    rng.shuffle(members);
    for (std::size_t t = 0; t < n_test; ++t) in_test[members[t]] = true;
  }
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < ds.n(); ++i) (in_test[i] ? test_idx : train_idx).push_back(i);
  return SplitResult{ds.subset(train_idx), ds.subset(test_idx), std::move(train_idx), std::move(test_idx)};
}

// ---------------------------------------------------------------------------
// Scaling

Scaler fit_scaler(const Matrix& X) {
  if (X.empty() || X.cols() == 0) throw InvalidArgument("fit_scaler: empty matrix");
  audit::notify_fit("fit_scaler", X);
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  Scaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dlt = X(i, j) - mean;
      ss += dlt * dlt;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.means[j] = mean;
    s.stds[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix apply_scaler(const Scaler& s, const Matrix& X) {
  require_columns(X, s.dim(), "apply_scaler");
  Matrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) = (X(i, j) - s.means[j]) / s.stds[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(const Labels& y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("stratified_kfold: k must be at least 2");
  Rng rng(derive_seed(seed, "stratified_kfold"));
  FoldAssignment folds{k, std::vector<std::size_t>(y.size(), 0)};
  std::size_t offset = 0;
  for (int c = 0; c <= 1; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == c) members.push_back(i);
    }
    if (members.size() < k) {
      throw InvalidArgument("stratified_kfold: class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                            " rows, fewer than k=" + std::to_string(k));
    }
    rng.shuffle(members);
    // Continuing the rotation across classes keeps total fold sizes within one.
    for (std::size_t p = 0; p < members.size(); ++p) folds.fold_of[members[p]] = (offset + p) % k;
    offset = (offset + members.size()) % k;
  }
  return folds;
}

FoldAssignment stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  return stratified_kfold(ds.labels(), k, seed);
}

}  // namespace phishguard
