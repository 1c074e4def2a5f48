#include "phishguard/hyperparams.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "phishguard/error.hpp"

namespace phishguard {

namespace {

enum class Kind {
  integer,
  real,
  choice,
  depth,     // integer >= 0, or "none" (stored as 0 = unlimited)
  features,  // "sqrt" | "log2" | "all" | integer >= 1
};

struct ParamDef {
  const char* name;
  Kind kind;
  HyperValue fallback;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  std::vector<std::string> choices = {};
};

const std::vector<ParamDef>& param_table(Algorithm a) {
  static const std::vector<ParamDef> tree = {
      {"max_depth", Kind::depth, std::int64_t{0}, 0},
      {"min_samples_leaf", Kind::integer, std::int64_t{1}, 1},
      {"min_impurity_decrease", Kind::real, 0.0, 0},
  };
  static const std::vector<ParamDef> forest = {
      {"n_trees", Kind::integer, std::int64_t{100}, 1},
      {"max_depth", Kind::depth, std::int64_t{0}, 0},
      {"max_features", Kind::features, std::string("sqrt")},
      {"bootstrap", Kind::integer, std::int64_t{1}, 0, 1},
      {"min_samples_leaf", Kind::integer, std::int64_t{1}, 1},
  };
  static const std::vector<ParamDef> gb = {
      {"n_rounds", Kind::integer, std::int64_t{100}, 1},
      {"learning_rate", Kind::real, 0.1, 0},
      {"max_depth", Kind::integer, std::int64_t{3}, 1, 32},
      {"min_samples_leaf", Kind::integer, std::int64_t{1}, 1},
  };
  static const std::vector<ParamDef> xgb = {
      {"n_rounds", Kind::integer, std::int64_t{100}, 1},
      {"learning_rate", Kind::real, 0.1, 0},
      {"max_depth", Kind::integer, std::int64_t{6}, 1, 32},
      {"lambda", Kind::real, 1.0, 0},
      {"gamma", Kind::real, 0.0, 0},
      {"min_child_weight", Kind::real, 1.0, 0},
  };
  static const std::vector<ParamDef> cat = {
      {"n_rounds", Kind::integer, std::int64_t{100}, 1},
      {"learning_rate", Kind::real, 0.1, 0},
      {"depth", Kind::integer, std::int64_t{6}, 1, 16},
  };
  static const std::vector<ParamDef> ada = {
      {"n_estimators", Kind::integer, std::int64_t{50}, 1},
      {"learning_rate", Kind::real, 1.0, 0, std::numeric_limits<double>::infinity(), true},
      {"weak_depth", Kind::integer, std::int64_t{1}, 1, 32},
  };
  static const std::vector<ParamDef> svm = {
      {"C", Kind::real, 1.0, 0, std::numeric_limits<double>::infinity(), true},
      {"kernel", Kind::choice, std::string("rbf"), 0, 0, false, {"linear", "rbf"}},
      {"gamma", Kind::real, 0.1, 0, std::numeric_limits<double>::infinity(), true},
      {"tol", Kind::real, 1e-3, 0, std::numeric_limits<double>::infinity(), true},
      {"max_passes", Kind::integer, std::int64_t{100}, 1},
      {"platt_folds", Kind::integer, std::int64_t{3}, 0, 10},
  };
  switch (a) {
    case Algorithm::decision_tree: return tree;
    case Algorithm::random_forest: return forest;
    case Algorithm::gradient_boosting: return gb;
    case Algorithm::xgb_style: return xgb;
    case Algorithm::catboost_style: return cat;
    case Algorithm::adaboost: return ada;
    case Algorithm::svm: return svm;
  }
  throw InvalidArgument("unknown algorithm");
}

std::string describe(Algorithm a, const ParamDef& def) {
  return std::string(algorithm_name(a)) + "." + def.name;
}

HyperValue normalize(Algorithm a, const ParamDef& def, const HyperValue& v) {
  auto range_check = [&](double x) {
    const bool lo_ok = def.lo_open ? x > def.lo : x >= def.lo;
    if (!lo_ok || x > def.hi || std::isnan(x)) {
      throw ConfigError(describe(a, def) + " = " + to_string(v) + " is out of range");
    }
  };
  switch (def.kind) {
    case Kind::integer: {
      std::int64_t x = 0;
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        x = *i;
      } else if (const auto* d = std::get_if<double>(&v); d && std::floor(*d) == *d && std::abs(*d) < 9e15) {
        x = static_cast<std::int64_t>(*d);
      } else {
        throw ConfigError(describe(a, def) + " must be an integer");
      }
      range_check(static_cast<double>(x));
      return x;
    }
    case Kind::real: {
      double x = 0;
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        x = static_cast<double>(*i);
      } else if (const auto* d = std::get_if<double>(&v)) {
        x = *d;
      } else {
        throw ConfigError(describe(a, def) + " must be a number");
      }
      range_check(x);
      return x;
    }
    case Kind::choice: {
      const auto* s = std::get_if<std::string>(&v);
      if (!s) throw ConfigError(describe(a, def) + " must be a string");
      for (const auto& c : def.choices) {
        if (c == *s) return *s;
      }
      throw ConfigError(describe(a, def) + " = '" + *s + "' is not a valid choice");
    }
    case Kind::depth: {
      if (const auto* s = std::get_if<std::string>(&v)) {
        if (*s == "none") return std::int64_t{0};
        throw ConfigError(describe(a, def) + " must be an integer or \"none\"");
      }
      ParamDef as_int = def;
      as_int.kind = Kind::integer;
      return normalize(a, as_int, v);
    }
    case Kind::features: {
      if (const auto* s = std::get_if<std::string>(&v)) {
        if (*s == "sqrt" || *s == "log2" || *s == "all") return *s;
        throw ConfigError(describe(a, def) + " = '" + *s + "' is not sqrt, log2, all or an integer");
      }
      ParamDef as_int = def;
      as_int.kind = Kind::integer;
      as_int.lo = 1;
      return normalize(a, as_int, v);
    }
  }
  return v;
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::svm: return "svm";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::xgb_style: return "xgb_style";
    case Algorithm::catboost_style: return "catboost_style";
    case Algorithm::adaboost: return "adaboost";
    case Algorithm::gradient_boosting: return "gradient_boosting";
    case Algorithm::decision_tree: return "decision_tree";
  }
  return "unknown";
}

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::svm: return "SVM";
    case Algorithm::random_forest: return "RF";
    case Algorithm::xgb_style: return "XGB";
    case Algorithm::catboost_style: return "CB";
    case Algorithm::adaboost: return "AB";
    case Algorithm::gradient_boosting: return "GB";
    case Algorithm::decision_tree: return "DT";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::svm, Algorithm::random_forest, Algorithm::xgb_style, Algorithm::catboost_style,
                      Algorithm::adaboost, Algorithm::gradient_boosting, Algorithm::decision_tree}) {
    if (algorithm_name(a) == name || display_name(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

int algorithm_order(Algorithm a) {
  int i = 0;
  for (Algorithm b : kPipelineAlgorithms) {
    if (a == b) return i;
    ++i;
  }
  return i;
}

std::string to_string(const HyperValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return fmt::format("{}", std::get<double>(v));
}

ModelSpec::ModelSpec(Algorithm algorithm, Hyperparameters hyperparameters, std::uint64_t seed)
    : algorithm_(algorithm), seed_(seed) {
  const auto& table = param_table(algorithm);
  for (const auto& [name, value] : hyperparameters) {
    bool known = false;
    for (const auto& def : table) known = known || name == def.name;
    if (!known) throw ConfigError("unknown hyperparameter '" + name + "' for " + std::string(algorithm_name(algorithm)));
  }
  for (const auto& def : table) {
    auto it = hyperparameters.find(def.name);
    params_[def.name] = normalize(algorithm, def, it == hyperparameters.end() ? def.fallback : it->second);
  }
}

ModelSpec ModelSpec::with_seed(std::uint64_t seed) const {
  ModelSpec copy = *this;
  copy.seed_ = seed;
  return copy;
}

ModelSpec ModelSpec::with(const std::string& name, HyperValue value) const {
  Hyperparameters p = params_;
  p[name] = std::move(value);
  return ModelSpec(algorithm_, std::move(p), seed_);
}

double ModelSpec::get_double(const std::string& name) const {
  const auto& v = params_.at(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

std::int64_t ModelSpec::get_int(const std::string& name) const { return std::get<std::int64_t>(params_.at(name)); }

std::string ModelSpec::get_string(const std::string& name) const { return to_string(params_.at(name)); }

std::string ModelSpec::canonical() const {
  std::string out(algorithm_name(algorithm_));
  out += "{";
  bool first = true;
  for (const auto& [k, v] : params_) {
    if (!first) out += ",";
    first = false;
    out += k + "=" + to_string(v);
  }
  return out + "}";
}

std::vector<std::string> hyperparameter_names(Algorithm a) {
  std::vector<std::string> names;
  for (const auto& def : param_table(a)) names.emplace_back(def.name);
  return names;
}

}  // namespace phishguard
