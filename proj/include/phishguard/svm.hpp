#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "phishguard/learners.hpp"

namespace phishguard {

/// Dual solution on training data with labels mapped to +-1.
struct SvmDualSolution {
  std::vector<double> alpha;  // one per training row, in [0, C]
  std::vector<double> weights;  // linear only: primal w (bias excluded)
  double bias = 0.0;            // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  bool converged = false;
  std::size_t iterations = 0;
};

/// L2-regularized hinge-loss dual by coordinate descent. The bias is an
/// extra constant feature (regularized with the weights). Stops when the
/// projected-gradient gap drops below tol, or after max_passes epochs.
SvmDualSolution solve_linear_dcd(const Matrix& X, const std::vector<double>& ypm, double C, double tol,
                                 std::size_t max_passes, std::uint64_t seed);

/// RBF-kernel SMO with second-order working-set selection and an LRU cache
/// of kernel rows. Stops when the maximal KKT violation m(a) - M(a) < tol or
/// after max_iterations pair updates.
SvmDualSolution solve_rbf_smo(const Matrix& X, const std::vector<double>& ypm, double C, double gamma, double tol,
                              std::size_t max_iterations);

struct PlattScaling {
  double a = 0.0;
  double b = 0.0;
  /// P(y = 1 | f) = 1 / (1 + exp(a f + b)).
  double probability(double decision) const;
};

/// Newton fit with backtracking of Platt's sigmoid on decision values.
PlattScaling fit_platt(const std::vector<double>& decision, const Labels& y);

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

class SvmModel final : public Classifier {
 public:
  enum class Kernel { linear, rbf };

  /// Linear model.
  SvmModel(std::vector<double> weights, double bias, PlattScaling platt, bool converged);
  /// RBF model: support vectors with coefficients alpha_i y_i.
  SvmModel(Matrix support_vectors, std::vector<double> coef, double bias, double gamma, PlattScaling platt,
           bool converged);

  std::vector<double> decision_function(const Matrix& X) const;
  std::vector<double> score(const Matrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<SvmModel> from_json(const nlohmann::json& j);

  Kernel kernel() const noexcept { return kernel_; }
  bool converged() const noexcept { return converged_; }
  const PlattScaling& platt() const noexcept { return platt_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  std::size_t support_vector_count() const noexcept { return support_.rows(); }

 private:
  Kernel kernel_;
  std::vector<double> weights_;
  Matrix support_;
  std::vector<double> coef_;
  double bias_ = 0.0;
  double gamma_ = 0.0;
  PlattScaling platt_;
  bool converged_ = true;
};

}  // namespace phishguard
