#include "phishguard/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "phishguard/error.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

namespace {

std::int64_t first_int(const ModelSpec& s, std::initializer_list<const char*> names, bool zero_is_infinite) {
  for (const char* n : names) {
    auto it = s.hyperparameters().find(n);
    if (it == s.hyperparameters().end()) continue;
    const auto v = std::get<std::int64_t>(it->second);
    return zero_is_infinite && v == 0 ? std::numeric_limits<std::int64_t>::max() : v;
  }
  return 0;
}

double c_value(const ModelSpec& s) {
  auto it = s.hyperparameters().find("C");
  return it == s.hyperparameters().end() ? 0.0 : std::get<double>(it->second);
}

}  // namespace

bool tie_precedes(const ModelSpec& a, const ModelSpec& b) {
  const auto key = [](const ModelSpec& s) {
    return std::make_tuple(first_int(s, {"n_rounds", "n_trees", "n_estimators"}, false),
                           first_int(s, {"max_depth", "depth", "weak_depth"}, true), c_value(s), s.canonical());
  };
  return key(a) < key(b);
}

std::vector<ModelSpec> expand_grid(Algorithm algorithm, const ParamGrid& grid, std::uint64_t seed) {
  std::vector<Hyperparameters> points{{}};
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw ConfigError("grid for " + std::string(algorithm_name(algorithm)) + "." + name + " is empty");
    std::vector<Hyperparameters> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        auto q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  std::vector<ModelSpec> out;
  std::set<std::string> seen;
  for (auto& p : points) {
    if (algorithm == Algorithm::svm) {
      auto k = p.find("kernel");
      if (k != p.end() && std::get_if<std::string>(&k->second) && std::get<std::string>(k->second) == "linear") {
        p.erase("gamma");
      }
    }
    ModelSpec spec(algorithm, p, seed);
    if (seen.insert(spec.canonical()).second) out.push_back(std::move(spec));
  }
  return out;
}

SearchResult grid_search(const std::vector<ModelSpec>& grid, const Matrix& X, const Labels& y,
                         const FoldAssignment& folds, Metric metric) {
  if (grid.empty()) throw InvalidArgument("grid_search: empty grid");
  SearchResult r;
  r.trials.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t t) {
    Trial& trial = r.trials[t];
    trial.spec = grid[t];
    trial.folds = cv_confusions(grid[t], X, y, folds);
    for (const auto& cm : trial.folds) trial.fold_scores.push_back(metric_value(metrics(cm), metric));
    trial.mean_score = mean(trial.fold_scores);
  });
  std::size_t best = 0;
  for (std::size_t t = 1; t < r.trials.size(); ++t) {
    const auto& c = r.trials[t];
    const auto& b = r.trials[best];
    if (c.mean_score > b.mean_score || (c.mean_score == b.mean_score && tie_precedes(c.spec, b.spec))) best = t;
  }
  r.best_index = best;
  r.best_spec = r.trials[best].spec;
  r.best_cv_mean = r.trials[best].mean_score;
  return r;
}

std::vector<ModelSpec> sample_specs(Algorithm algorithm, const Distributions& dists, std::size_t n_trials,
                                    std::uint64_t seed, std::uint64_t model_seed) {
  if (n_trials == 0) throw ConfigError("random search needs at least one trial");
  std::vector<ModelSpec> out;
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, "random_search", t));
    Hyperparameters p;
    for (const auto& [name, d] : dists) {
      switch (d.kind) {
        case Distribution::Kind::log_uniform:
          if (!(d.lo > 0 && d.hi >= d.lo)) throw ConfigError("log-uniform range for " + name + " must be positive");
          p[name] = std::exp(rng.uniform(std::log(d.lo), std::log(d.hi)));
          break;
        case Distribution::Kind::uniform:
          if (!(d.hi >= d.lo)) throw ConfigError("empty range for " + name);
          p[name] = rng.uniform(d.lo, d.hi);
          break;
        case Distribution::Kind::uniform_int: {
          const auto lo = static_cast<std::int64_t>(std::ceil(d.lo));
          const auto hi = static_cast<std::int64_t>(std::floor(d.hi));
          if (hi < lo) throw ConfigError("empty integer range for " + name);
          p[name] = lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
          break;
        }
        case Distribution::Kind::choice:
          if (d.choices.empty()) throw ConfigError("empty choice list for " + name);
          p[name] = d.choices[rng.below(d.choices.size())];
          break;
      }
    }
    out.emplace_back(algorithm, std::move(p), model_seed);
  }
  return out;
}

SearchResult random_search(Algorithm algorithm, const Distributions& dists, std::size_t n_trials, std::uint64_t seed,
                           std::uint64_t model_seed, const Matrix& X, const Labels& y, const FoldAssignment& folds,
                           Metric metric) {
  return grid_search(sample_specs(algorithm, dists, n_trials, seed, model_seed), X, y, folds, metric);
}

std::vector<RankEntry> rank_models(std::vector<RankEntry> entries) {
  if (entries.empty()) throw InvalidArgument("rank_models: no entries");
  std::set<Algorithm> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.algorithm).second) {
      throw InvalidArgument("rank_models: duplicate entry " + std::string(algorithm_name(e.algorithm)));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.f1 != b.f1) return a.f1 > b.f1;
    return algorithm_order(a.algorithm) < algorithm_order(b.algorithm);
  });
  return entries;
}

}  // namespace phishguard
