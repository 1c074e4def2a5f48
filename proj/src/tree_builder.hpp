#pragma once

// Level-wise exact-greedy tree growth shared by every tree learner.
//
// Each feature's rows are pre-sorted once; a level is grown with one pass
// per feature over that order, accumulating left-side statistics for every
// open node at once. Candidate thresholds are midpoints between consecutive
// distinct values inside a node. Features are scanned in ascending order and
// thresholds ascending within a feature, and a candidate replaces the
// incumbent only on strictly larger gain, so ties go to the lowest feature
// index and then the lowest threshold.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "phishguard/matrix.hpp"
#include "phishguard/rng.hpp"
#include "phishguard/trees.hpp"

namespace phishguard::detail {

class ColumnOrder {
 public:
  explicit ColumnOrder(const Matrix& X) : order_(X.cols()) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      auto& o = order_[j];
      o.resize(X.rows());
      std::iota(o.begin(), o.end(), 0U);
      std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return X(a, j) < X(b, j); });
    }
  }

  const std::vector<std::uint32_t>& operator[](std::size_t j) const { return order_[j]; }
  std::size_t features() const { return order_.size(); }

 private:
  std::vector<std::vector<std::uint32_t>> order_;
};

inline double split_midpoint(double lo, double hi) {
  double t = 0.5 * lo + 0.5 * hi;
  if (!(t > lo) || t > hi) t = hi;
  return t;
}

struct GrowOptions {
  std::size_t max_depth = 0;     // 0 = unlimited
  std::size_t max_features = 0;  // 0 = all features at every node
};

// Policy concept:
//   using Stats;
//   bool active(i); Stats row(i);
//   static void add(Stats&, const Stats&); static Stats minus(const Stats&, const Stats&);
//   bool splittable(const Stats&); bool admissible(const Stats& l, const Stats& r);
//   double gain(const Stats& parent, const Stats& l, const Stats& r);
//   bool accept(double gain, const Stats& root); double leaf(const Stats&);
template <class Policy>
Tree grow_tree(const Matrix& X, const ColumnOrder& order, const Policy& policy, const GrowOptions& opt, Rng* rng,
               std::vector<double>& importance) {
  using Stats = typename Policy::Stats;
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  importance.resize(d, 0.0);

  std::vector<std::int32_t> node_of(n, -1);
  std::vector<std::vector<std::uint32_t>> ord(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (policy.active(i)) node_of[i] = 0;
  }
  for (std::size_t j = 0; j < d; ++j) {
    ord[j].reserve(n);
    for (std::uint32_t i : order[j]) {
      if (node_of[i] >= 0) ord[j].push_back(i);
    }
  }

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Stats> stats(1);
  for (std::size_t i = 0; i < n; ++i) {
    if (node_of[i] >= 0) Policy::add(stats[0], policy.row(i));
  }
  const Stats root = stats[0];

  struct Best {
    double gain = -std::numeric_limits<double>::infinity();
    std::int32_t feature = -1;
    double threshold = 0.0;
  };

  const bool subsample = opt.max_features > 0 && opt.max_features < d;
  std::vector<std::int32_t> frontier{0};
  std::vector<std::size_t> feature_pool(d);

  for (std::size_t depth = 0; !frontier.empty() && (opt.max_depth == 0 || depth < opt.max_depth); ++depth) {
    std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
    std::vector<std::int32_t> slot_node;
    for (std::int32_t node : frontier) {
      if (policy.splittable(stats[node])) {
        slot_of[node] = static_cast<std::int32_t>(slot_node.size());
        slot_node.push_back(node);
      }
    }
    if (slot_node.empty()) break;
    const std::size_t slots = slot_node.size();

    std::vector<char> allowed;
    if (subsample) {
      allowed.assign(slots * d, 0);
      for (std::size_t s = 0; s < slots; ++s) {
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        for (std::size_t t = 0; t < opt.max_features; ++t) {
          const std::size_t pick = t + rng->below(d - t);
          std::swap(feature_pool[t], feature_pool[pick]);
          allowed[s * d + feature_pool[t]] = 1;
        }
      }
    }

    std::vector<Best> best(slots);
    std::vector<Stats> left(slots);
    std::vector<double> last(slots, 0.0);
    std::vector<char> has(slots, 0);
    for (std::size_t j = 0; j < d; ++j) {
      std::fill(left.begin(), left.end(), Stats{});
      std::fill(has.begin(), has.end(), 0);
      for (std::uint32_t i : ord[j]) {
        const std::int32_t node = node_of[i];
        const std::int32_t s = slot_of[node];
        if (s < 0) continue;
        if (subsample && !allowed[static_cast<std::size_t>(s) * d + j]) continue;
        const double v = X(i, j);
        if (has[s] && v != last[s]) {
          const Stats right = Policy::minus(stats[node], left[s]);
          if (policy.admissible(left[s], right)) {
            const double g = policy.gain(stats[node], left[s], right);
            if (g > best[s].gain) best[s] = Best{g, static_cast<std::int32_t>(j), split_midpoint(last[s], v)};
          }
        }
        Policy::add(left[s], policy.row(i));
        last[s] = v;
        has[s] = 1;
      }
    }

    std::vector<std::int32_t> next;
    for (std::size_t s = 0; s < slots; ++s) {
      const std::int32_t node = slot_node[s];
      if (best[s].feature < 0 || !policy.accept(best[s].gain, root)) continue;
      const auto l = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      stats.emplace_back();
      stats.emplace_back();
      TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      nd.feature = best[s].feature;
      nd.threshold = best[s].threshold;
      nd.left = l;
      nd.right = l + 1;
      importance[static_cast<std::size_t>(best[s].feature)] += std::max(0.0, best[s].gain);
      next.push_back(l);
      next.push_back(l + 1);
    }

    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int32_t node = node_of[i];
      if (node < 0) continue;
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      if (nd.feature < 0) {
        node_of[i] = -1;
        continue;
      }
      const std::int32_t child = X(i, static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
      node_of[i] = child;
      Policy::add(stats[static_cast<std::size_t>(child)], policy.row(i));
      moved = true;
    }
    if (!moved) break;
    for (auto& o : ord) {
      o.erase(std::remove_if(o.begin(), o.end(), [&](std::uint32_t i) { return node_of[i] < 0; }), o.end());
    }
    frontier = std::move(next);
  }

  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].feature < 0) tree.nodes[k].value = policy.leaf(stats[k]);
  }
  return tree;
}

/// Oblivious variant: per level, the (feature, threshold) maximizing the
/// summed gain over all nodes of the level. Candidate thresholds are
/// midpoints between consecutive distinct values over all rows.
template <class Policy>
ObliviousTree grow_oblivious(const Matrix& X, const ColumnOrder& order, const Policy& policy, std::size_t depth,
                             std::vector<double>& importance) {
  using Stats = typename Policy::Stats;
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  importance.resize(d, 0.0);
  std::vector<std::uint32_t> node_of(n, 0);
  ObliviousTree tree;

  for (std::size_t level = 0; level < depth; ++level) {
    const std::size_t width = std::size_t{1} << level;
    std::vector<Stats> stats(width);
    for (std::size_t i = 0; i < n; ++i) Policy::add(stats[node_of[i]], policy.row(i));
    bool any_splittable = false;
    for (const auto& s : stats) any_splittable = any_splittable || policy.splittable(s);
    if (!any_splittable) break;

    double best_gain = -std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<Stats> left(width);
    std::vector<double> term(width);
    for (std::size_t j = 0; j < d; ++j) {
      std::fill(left.begin(), left.end(), Stats{});
      std::fill(term.begin(), term.end(), 0.0);
      double total = 0.0;
      bool has = false;
      double last = 0.0;
      for (std::uint32_t i : order[j]) {
        const double v = X(i, j);
        if (has && v != last && total > best_gain) {
          best_gain = total;
          best_feature = static_cast<std::int32_t>(j);
          best_threshold = split_midpoint(last, v);
        }
        const std::uint32_t k = node_of[i];
        Policy::add(left[k], policy.row(i));
        const double t = policy.level_gain(stats[k], left[k], Policy::minus(stats[k], left[k]));
        total += t - term[k];
        term[k] = t;
        last = v;
        has = true;
      }
    }
    if (best_feature < 0) break;
    tree.features.push_back(best_feature);
    tree.thresholds.push_back(best_threshold);
    importance[static_cast<std::size_t>(best_feature)] += std::max(0.0, best_gain);
    for (std::size_t i = 0; i < n; ++i) {
      node_of[i] = (node_of[i] << 1) | (X(i, static_cast<std::size_t>(best_feature)) < best_threshold ? 0U : 1U);
    }
  }

  const std::size_t leaves = std::size_t{1} << tree.features.size();
  std::vector<Stats> stats(leaves);
  for (std::size_t i = 0; i < n; ++i) Policy::add(stats[node_of[i]], policy.row(i));
  tree.leaf_values.resize(leaves);
  for (std::size_t k = 0; k < leaves; ++k) tree.leaf_values[k] = policy.leaf(stats[k]);
  return tree;
}

}  // namespace phishguard::detail
