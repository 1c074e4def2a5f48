#include "phishguard/svm.hpp"

#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <unordered_map>

#include "phishguard/audit.hpp"
#include "phishguard/data.hpp"
#include "phishguard/error.hpp"
#include "phishguard/rng.hpp"

namespace phishguard {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

// ---------------------------------------------------------------------------
// Linear: dual coordinate descent

SvmDualSolution solve_linear_dcd(const Matrix& X, const std::vector<double>& ypm, double C, double tol,
                                 std::size_t max_passes, std::uint64_t seed) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  SvmDualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> w(d + 1, 0.0);  // last entry multiplies the constant feature
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : X.row(i)) s += v * v;
    qd[i] = s;
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "svm_dcd"));

  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    rng.shuffle(perm);
    double max_pg = -std::numeric_limits<double>::infinity();
    double min_pg = std::numeric_limits<double>::infinity();
    for (std::size_t i : perm) {
      const auto x = X.row(i);
      double f = w[d];
      for (std::size_t j = 0; j < d; ++j) f += w[j] * x[j];
      const double g = ypm[i] * f - 1.0;
      double& a = sol.alpha[i];
      double pg = g;
      if (a <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (a >= C) {
        pg = std::max(g, 0.0);
      }
      max_pg = std::max(max_pg, pg);
      min_pg = std::min(min_pg, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = a;
        a = std::min(std::max(a - g / qd[i], 0.0), C);
        const double delta = (a - old) * ypm[i];
        for (std::size_t j = 0; j < d; ++j) w[j] += delta * x[j];
        w[d] += delta;
      }
    }
    sol.iterations = pass + 1;
    if (max_pg - min_pg < tol) {
      sol.converged = true;
      break;
    }
  }
  sol.bias = w[d];
  w.pop_back();
  sol.weights = std::move(w);
  return sol;
}

// ---------------------------------------------------------------------------
// RBF: SMO

namespace {

/// LRU cache of rows of Q_ij = y_i y_j K(x_i, x_j).
class KernelRowCache {
 public:
  KernelRowCache(const Matrix& X, const std::vector<double>& ypm, double gamma, std::size_t budget_bytes)
      : X_(X), y_(ypm), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, X.rows() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_) {
      values = std::move(lru_.back().second);
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    values.resize(X_.rows());
    const auto xi = X_.row(i);
    for (std::size_t j = 0; j < X_.rows(); ++j) values[j] = y_[i] * y_[j] * rbf_kernel(xi, X_.row(j), gamma_);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const Matrix& X_;
  const std::vector<double>& y_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

constexpr double kTau = 1e-12;
constexpr std::size_t kCacheBytes = std::size_t{256} << 20;

}  // namespace

SvmDualSolution solve_rbf_smo(const Matrix& X, const std::vector<double>& y, double C, double gamma, double tol,
                              std::size_t max_iterations) {
  const std::size_t n = X.rows();
  SvmDualSolution sol;
  sol.alpha.assign(n, 0.0);
  auto& a = sol.alpha;
  std::vector<double> G(n, -1.0);
  const std::vector<double> QD(n, 1.0);  // K(x, x) = 1
  KernelRowCache cache(X, y, gamma, kCacheBytes);

  const auto is_upper = [&](std::size_t t) { return a[t] >= C; };
  const auto is_lower = [&](std::size_t t) { return a[t] <= 0.0; };

  std::size_t iter = 0;
  for (; iter < max_iterations; ++iter) {
    // Working-set selection (second order).
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_upper(t) && -G[t] >= gmax) {
          gmax = -G[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!is_lower(t) && G[t] >= gmax) {
        gmax = G[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0) {
      sol.converged = true;
      break;
    }
    const auto ui = static_cast<std::size_t>(i);
    const std::vector<double>& Qi = cache.row(ui);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double obj_min = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_lower(t)) {
          const double grad_diff = gmax + G[t];
          gmax2 = std::max(gmax2, G[t]);
          if (grad_diff > 0) {
            const double quad = QD[ui] + QD[t] - 2.0 * y[ui] * Qi[t];
            const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
            if (obj <= obj_min) {
              obj_min = obj;
              j = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      } else if (!is_upper(t)) {
        const double grad_diff = gmax - G[t];
        gmax2 = std::max(gmax2, -G[t]);
        if (grad_diff > 0) {
          const double quad = QD[ui] + QD[t] + 2.0 * y[ui] * Qi[t];
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) {
            obj_min = obj;
            j = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < tol || j < 0) {
      sol.converged = true;
      break;
    }
    const auto uj = static_cast<std::size_t>(j);
    const std::vector<double>& Qi2 = cache.row(ui);
    const std::vector<double>& Qj = cache.row(uj);

    const double old_ai = a[ui];
    const double old_aj = a[uj];
    if (y[ui] != y[uj]) {
      double quad = QD[ui] + QD[uj] + 2.0 * Qi2[uj];
      if (quad <= 0) quad = kTau;
      const double delta = (-G[ui] - G[uj]) / quad;
      const double diff = a[ui] - a[uj];
      a[ui] += delta;
      a[uj] += delta;
      if (diff > 0) {
        if (a[uj] < 0) {
          a[uj] = 0;
          a[ui] = diff;
        }
      } else if (a[ui] < 0) {
        a[ui] = 0;
        a[uj] = -diff;
      }
      if (diff > 0) {
        if (a[ui] > C) {
          a[ui] = C;
          a[uj] = C - diff;
        }
      } else if (a[uj] > C) {
        a[uj] = C;
        a[ui] = C + diff;
      }
    } else {
      double quad = QD[ui] + QD[uj] - 2.0 * Qi2[uj];
      if (quad <= 0) quad = kTau;
      const double delta = (G[ui] - G[uj]) / quad;
      const double sum = a[ui] + a[uj];
      a[ui] -= delta;
      a[uj] += delta;
      if (sum > C) {
        if (a[ui] > C) {
          a[ui] = C;
          a[uj] = sum - C;
        }
      } else if (a[uj] < 0) {
        a[uj] = 0;
        a[ui] = sum;
      }
      if (sum > C) {
        if (a[uj] > C) {
          a[uj] = C;
          a[ui] = sum - C;
        }
      } else if (a[ui] < 0) {
        a[ui] = 0;
        a[uj] = sum;
      }
    }
    const double dai = a[ui] - old_ai;
    const double daj = a[uj] - old_aj;
    for (std::size_t t = 0; t < n; ++t) G[t] += Qi2[t] * dai + Qj[t] * daj;
  }
  sol.iterations = iter;

  // Offset from free support vectors, or the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (is_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  sol.bias = -rho;
  return sol;
}

// ---------------------------------------------------------------------------
// Platt scaling

double PlattScaling::probability(double decision) const {
  const double z = decision * a + b;
  return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PlattScaling fit_platt(const std::vector<double>& dec, const Labels& y) {
  double prior1 = 0, prior0 = 0;
  for (int v : y) (v == 1 ? prior1 : prior0) += 1.0;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == 1 ? hi : lo;

  const auto objective = [&](double A, double B) {
    double f = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const double z = dec[i] * A + B;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double A = 0.0;
  double B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(A, B);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const double z = dec[i] * A + B;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= 1e-10) {
      const double nA = A + step * dA;
      const double nB = B + step * dB;
      const double nf = objective(nA, nB);
      if (nf < fval + 1e-4 * step * gd) {
        A = nA;
        B = nB;
        fval = nf;
        break;
      }
      step *= 0.5;
    }
    if (step < 1e-10) break;
  }
  return PlattScaling{A, B};
}

// ---------------------------------------------------------------------------
// Model

SvmModel::SvmModel(std::vector<double> weights, double bias, PlattScaling platt, bool converged)
    : kernel_(Kernel::linear), weights_(std::move(weights)), bias_(bias), platt_(platt), converged_(converged) {}

SvmModel::SvmModel(Matrix support_vectors, std::vector<double> coef, double bias, double gamma, PlattScaling platt,
                   bool converged)
    : kernel_(Kernel::rbf),
      support_(std::move(support_vectors)),
      coef_(std::move(coef)),
      bias_(bias),
      gamma_(gamma),
      platt_(platt),
      converged_(converged) {}

std::vector<double> SvmModel::decision_function(const Matrix& X) const {
  std::vector<double> out(X.rows(), bias_);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    if (kernel_ == Kernel::linear) {
      for (std::size_t j = 0; j < weights_.size(); ++j) out[i] += weights_[j] * x[j];
    } else {
      for (std::size_t s = 0; s < support_.rows(); ++s) out[i] += coef_[s] * rbf_kernel(support_.row(s), x, gamma_);
    }
  }
  return out;
}

std::vector<double> SvmModel::score(const Matrix& X) const {
  auto f = decision_function(X);
  for (auto& v : f) v = platt_.probability(v);
  return f;
}

std::optional<std::vector<double>> SvmModel::importances() const {
  if (kernel_ != Kernel::linear) return std::nullopt;
  std::vector<double> raw(weights_.size());
  for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = std::abs(weights_[j]);
  return normalize_importances(std::move(raw));
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json j = {{"kernel", kernel_ == Kernel::linear ? "linear" : "rbf"},
                      {"bias", bias_},
                      {"platt_a", platt_.a},
                      {"platt_b", platt_.b},
                      {"converged", converged_}};
  if (kernel_ == Kernel::linear) {
    j["weights"] = weights_;
  } else {
    j["gamma"] = gamma_;
    j["coef"] = coef_;
    j["dim"] = support_.cols();
    j["support_vectors"] = std::vector<double>(support_.data().begin(), support_.data().end());
  }
  return j;
}

std::shared_ptr<SvmModel> SvmModel::from_json(const nlohmann::json& j) {
  const PlattScaling platt{j.at("platt_a").get<double>(), j.at("platt_b").get<double>()};
  const bool converged = j.at("converged").get<bool>();
  if (j.at("kernel").get<std::string>() == "linear") {
    return std::make_shared<SvmModel>(j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(), platt,
                                      converged);
  }
  auto coef = j.at("coef").get<std::vector<double>>();
  const auto dim = j.at("dim").get<std::size_t>();
  auto flat = j.at("support_vectors").get<std::vector<double>>();
  if (flat.size() != coef.size() * dim) throw IoError("malformed svm payload");
  Matrix sv(coef.size(), dim, std::move(flat));
  return std::make_shared<SvmModel>(std::move(sv), std::move(coef), j.at("bias").get<double>(),
                                    j.at("gamma").get<double>(), platt, converged);
}

namespace {

struct FittedDecision {
  std::shared_ptr<SvmModel> raw;  // Platt a = b = 0 placeholder
  SvmDualSolution solution;
};

FittedDecision fit_decision(const Matrix& X, const Labels& y, const ModelSpec& spec, std::uint64_t seed) {
  std::vector<double> ypm(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ypm[i] = y[i] == 1 ? 1.0 : -1.0;
  const double C = spec.get_double("C");
  const double tol = spec.get_double("tol");
  const auto passes = static_cast<std::size_t>(spec.get_int("max_passes"));
  FittedDecision out;
  if (spec.get_string("kernel") == "linear") {
    out.solution = solve_linear_dcd(X, ypm, C, tol, passes, seed);
    out.raw = std::make_shared<SvmModel>(out.solution.weights, out.solution.bias, PlattScaling{}, out.solution.converged);
  } else {
    const double gamma = spec.get_double("gamma");
    out.solution = solve_rbf_smo(X, ypm, C, gamma, tol, passes * std::max<std::size_t>(X.rows(), 1000));
    std::vector<std::size_t> sv;
    std::vector<double> coef;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      if (out.solution.alpha[i] > 0.0) {
        sv.push_back(i);
        coef.push_back(out.solution.alpha[i] * ypm[i]);
      }
    }
    out.raw = std::make_shared<SvmModel>(X.select_rows(sv), std::move(coef), out.solution.bias, gamma, PlattScaling{},
                                         out.solution.converged);
  }
  return out;
}

}  // namespace

TrainedModel train_svm(const Matrix& X, const Labels& y, const ModelSpec& spec) {
  if (spec.algorithm() != Algorithm::svm) throw InvalidArgument("train_svm: wrong spec");
  require_binary_labels(X, y, "train_svm");
  if (X.rows() < 2) throw InvalidArgument("train_svm: need at least two rows");
  audit::notify_fit("train:svm", X);

  const FittedDecision full = fit_decision(X, y, spec, spec.seed());

  // Platt calibration on out-of-fold decision values; in-sample when a class
  // is too small to be split.
  const auto folds_wanted = static_cast<std::size_t>(spec.get_int("platt_folds"));
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t negatives = y.size() - positives;
  std::vector<double> dec;
  if (folds_wanted >= 2 && std::min(positives, negatives) >= 2 * folds_wanted) {
    dec.assign(y.size(), 0.0);
    const FoldAssignment folds = stratified_kfold(y, folds_wanted, derive_seed(spec.seed(), "platt_folds"));
    for (std::size_t f = 0; f < folds_wanted; ++f) {
      const auto tr = folds.train_indices(f);
      const auto te = folds.test_indices(f);
      Labels ytr;
      for (std::size_t i : tr) ytr.push_back(y[i]);
      const FittedDecision part = fit_decision(X.select_rows(tr), ytr, spec, derive_seed(spec.seed(), "platt_fit", f));
      const auto d = part.raw->decision_function(X.select_rows(te));
      for (std::size_t t = 0; t < te.size(); ++t) dec[te[t]] = d[t];
    }
  } else {
    dec = full.raw->decision_function(X);
  }
  const PlattScaling platt = fit_platt(dec, y);

  std::shared_ptr<SvmModel> model;
  if (full.raw->kernel() == SvmModel::Kernel::linear) {
    model = std::make_shared<SvmModel>(full.raw->weights(), full.raw->bias(), platt, full.solution.converged);
  } else {
    auto j = full.raw->to_json();
    j["platt_a"] = platt.a;
    j["platt_b"] = platt.b;
    model = SvmModel::from_json(j);
  }
  return TrainedModel(spec, std::move(model), X.cols());
}

}  // namespace phishguard
