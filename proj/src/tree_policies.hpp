#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "phishguard/matrix.hpp"

namespace phishguard::detail {

/// Weighted Gini impurity for classification trees.
class GiniPolicy {
 public:
  struct Stats {
    double w0 = 0.0;
    double w1 = 0.0;
    std::uint32_t n = 0;
  };

  GiniPolicy(const Labels& y, std::span<const double> weights, std::size_t min_leaf, double min_decrease)
      : y_(y), w_(weights), min_leaf_(min_leaf), min_decrease_(min_decrease) {}

  bool active(std::size_t i) const { return w_.empty() || w_[i] > 0.0; }
  Stats row(std::size_t i) const {
    const double w = w_.empty() ? 1.0 : w_[i];
    return y_[i] == 1 ? Stats{0.0, w, 1} : Stats{w, 0.0, 1};
  }
  static void add(Stats& a, const Stats& b) {
    a.w0 += b.w0;
    a.w1 += b.w1;
    a.n += b.n;
  }
  static Stats minus(const Stats& a, const Stats& b) { return {a.w0 - b.w0, a.w1 - b.w1, a.n - b.n}; }

  static double weighted_impurity(const Stats& s) {
    const double w = s.w0 + s.w1;
    return w > 0.0 ? w - (s.w0 * s.w0 + s.w1 * s.w1) / w : 0.0;
  }

  bool splittable(const Stats& s) const { return s.w0 > 0.0 && s.w1 > 0.0 && s.n >= 2 * min_leaf_; }
  bool admissible(const Stats& l, const Stats& r) const {
    return l.n >= min_leaf_ && r.n >= min_leaf_ && l.w0 + l.w1 > 0.0 && r.w0 + r.w1 > 0.0;
  }
  double gain(const Stats& p, const Stats& l, const Stats& r) const {
    return weighted_impurity(p) - weighted_impurity(l) - weighted_impurity(r);
  }
  // Zero-gain splits are allowed (needed for XOR-like structure).
  bool accept(double g, const Stats& root) const {
    const double w = root.w0 + root.w1;
    return g + 1e-12 * w >= min_decrease_ * w;
  }
  double leaf(const Stats& s) const {
    const double w = s.w0 + s.w1;
    return w > 0.0 ? s.w1 / w : 0.0;
  }

 private:
  const Labels& y_;
  std::span<const double> w_;
  std::size_t min_leaf_;
  double min_decrease_;
};

/// Least-squares fit to the residual y - p with a single Newton step per leaf
/// (first-order gradient boosting and the oblivious-tree surrogate).
class NewtonPolicy {
 public:
  struct Stats {
    double r = 0.0;   // sum of residuals
    double h = 0.0;   // sum of p (1 - p)
    double rr = 0.0;  // sum of squared residuals
    std::uint32_t n = 0;
  };

  NewtonPolicy(std::span<const double> residual, std::span<const double> hessian, std::size_t min_leaf,
               double learning_rate)
      : r_(residual), h_(hessian), min_leaf_(min_leaf), lr_(learning_rate) {}

  bool active(std::size_t) const { return true; }
  Stats row(std::size_t i) const { return {r_[i], h_[i], r_[i] * r_[i], 1}; }
  static void add(Stats& a, const Stats& b) {
    a.r += b.r;
    a.h += b.h;
    a.rr += b.rr;
    a.n += b.n;
  }
  static Stats minus(const Stats& a, const Stats& b) { return {a.r - b.r, a.h - b.h, a.rr - b.rr, a.n - b.n}; }

  bool splittable(const Stats& s) const {
    if (s.n < 2 * min_leaf_) return false;
    const double sse = s.rr - s.r * s.r / s.n;
    return sse > 1e-10 * s.rr;
  }
  bool admissible(const Stats& l, const Stats& r) const { return l.n >= min_leaf_ && r.n >= min_leaf_; }
  double gain(const Stats& p, const Stats& l, const Stats& r) const { return level_gain(p, l, r); }
  static double level_gain(const Stats& p, const Stats& l, const Stats& r) {
    const double gl = l.n ? l.r * l.r / l.n : 0.0;
    const double gr = r.n ? r.r * r.r / r.n : 0.0;
    const double gp = p.n ? p.r * p.r / p.n : 0.0;
    return gl + gr - gp;
  }
  bool accept(double g, const Stats& root) const { return g >= -1e-12 * root.rr; }
  double leaf(const Stats& s) const { return s.h > 1e-300 ? lr_ * s.r / s.h : 0.0; }

 private:
  std::span<const double> r_;
  std::span<const double> h_;
  std::size_t min_leaf_;
  double lr_;
};

/// Second-order regularized gain: 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma.
class SecondOrderPolicy {
 public:
  struct Stats {
    double g = 0.0;
    double h = 0.0;
    std::uint32_t n = 0;
  };

  SecondOrderPolicy(std::span<const double> grad, std::span<const double> hess, double lambda, double gamma,
                    double min_child_weight, double learning_rate)
      : g_(grad), h_(hess), lambda_(lambda), gamma_(gamma), mcw_(min_child_weight), lr_(learning_rate) {}

  bool active(std::size_t) const { return true; }
  Stats row(std::size_t i) const { return {g_[i], h_[i], 1}; }
  static void add(Stats& a, const Stats& b) {
    a.g += b.g;
    a.h += b.h;
    a.n += b.n;
  }
  static Stats minus(const Stats& a, const Stats& b) { return {a.g - b.g, a.h - b.h, a.n - b.n}; }

  bool splittable(const Stats& s) const { return s.n >= 2; }
  bool admissible(const Stats& l, const Stats& r) const {
    return l.n >= 1 && r.n >= 1 && l.h >= mcw_ && r.h >= mcw_ && l.h + lambda_ > 0.0 && r.h + lambda_ > 0.0;
  }
  double score(const Stats& s) const { return s.h + lambda_ > 0.0 ? s.g * s.g / (s.h + lambda_) : 0.0; }
  double gain(const Stats& p, const Stats& l, const Stats& r) const {
    return 0.5 * (score(l) + score(r) - score(p)) - gamma_;
  }
  bool accept(double g, const Stats&) const { return g > 0.0; }
  double leaf(const Stats& s) const { return s.h + lambda_ > 0.0 ? -lr_ * s.g / (s.h + lambda_) : 0.0; }

 private:
  std::span<const double> g_;
  std::span<const double> h_;
  double lambda_;
  double gamma_;
  double mcw_;
  double lr_;
};

}  // namespace phishguard::detail
