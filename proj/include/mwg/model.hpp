#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mwg/potential.hpp"

namespace mwg {

/// Parameters of a Gaussian full conditional, used for exact coordinate draws.
struct GaussianConditional {
  double mean = 0.0;
  double variance = 1.0;
};

/// A d-dimensional target seen through its one-dimensional full conditionals.
/// Implementations are immutable after construction.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::size_t dim() const = 0;

  /// Potential of X_m given the other coordinates of `x` (x[m] itself is ignored).
  virtual Potential1D cond_potential(std::size_t m, std::span<const double> x) const = 0;

  /// Exact conditional law when it is Gaussian and the model opts into exact
  /// draws for coordinate m.
  virtual std::optional<GaussianConditional> exact_cond(std::size_t /*m*/,
                                                        std::span<const double> /*x*/) const {
    return std::nullopt;
  }

  /// Global Lipschitz constant L_m of the m-th partial derivative in x_m.
  virtual double coordinate_smoothness(std::size_t m) const = 0;

  /// Starting point for chains.
  virtual std::vector<double> initial_state() const { return std::vector<double>(dim(), 0.0); }
};

/// A single potential viewed as a d = 1 target.
class UnivariateTarget final : public TargetModel {
 public:
  explicit UnivariateTarget(Potential1D pot, double smoothness = 1.0);

  std::size_t dim() const override { return 1; }
  Potential1D cond_potential(std::size_t m, std::span<const double> x) const override;
  double coordinate_smoothness(std::size_t) const override { return smoothness_; }
  std::vector<double> initial_state() const override;

 private:
  Potential1D pot_;
  double smoothness_;
};

/// N(0, A^{-1}) given by its precision matrix A. Conditionals are Gaussian with
/// variance 1/A_mm; `exact_updates` selects whether samplers draw them exactly.
class GaussianTarget final : public TargetModel {
 public:
  explicit GaussianTarget(Eigen::MatrixXd precision, bool exact_updates = false);

  std::size_t dim() const override { return static_cast<std::size_t>(precision_.rows()); }
  const Eigen::MatrixXd& precision() const { return precision_; }

  GaussianConditional conditional(std::size_t m, std::span<const double> x) const;
  Potential1D cond_potential(std::size_t m, std::span<const double> x) const override;
  std::optional<GaussianConditional> exact_cond(std::size_t m,
                                                std::span<const double> x) const override;
  double coordinate_smoothness(std::size_t m) const override { return precision_(m, m); }

 private:
  Eigen::MatrixXd precision_;
  bool exact_updates_;
};

/// Posterior of the two-level logistic model
///   Y_ji | theta_j ~ Bernoulli(logistic(theta_j)),  theta_j | mu ~ N(mu, 1),  mu ~ N(0, 1)
/// with coordinates ordered (mu, theta_1, ..., theta_J). Only the counts
/// y_j = sum_i Y_ji enter the likelihood.
class HierLogisticPosterior final : public TargetModel {
 public:
  HierLogisticPosterior(int n, std::vector<int> y);

  int groups() const { return static_cast<int>(y_.size()); }
  int trials() const { return n_; }
  const std::vector<int>& counts() const { return y_; }

  std::size_t dim() const override { return y_.size() + 1; }
  Potential1D cond_potential(std::size_t m, std::span<const double> x) const override;
  /// Exact for m = 0 (mu); theta coordinates have no closed-form conditional.
  std::optional<GaussianConditional> exact_cond(std::size_t m,
                                                std::span<const double> x) const override;
  /// J + 1 for mu, 1 + n/4 for every theta_j.
  double coordinate_smoothness(std::size_t m) const override;

 private:
  int n_;
  std::vector<int> y_;
};

/// U(theta) = -y theta + n log(1 + e^theta) + (theta - mu)^2 / 2.
/// Throws std::domain_error unless 0 <= y <= n.
Potential1D logistic_cond_potential(int y, int n, double mu);

/// Gaussian conditional of mu given theta: N(sum(theta)/(J+1), 1/(J+1)).
GaussianConditional mu_cond_params(std::span<const double> theta);

/// Condition number 1 + n/4 of each theta_j conditional.
double condition_number_logistic(int n);

/// kappa* = 1 / lambda_min(D^{-1/2} A D^{-1/2}) with D = diag(A).
/// Throws std::domain_error for non-symmetric or non-positive-definite A.
double kappa_star_gaussian(const Eigen::MatrixXd& precision);

/// Classical condition number lambda_max / lambda_min of an SPD matrix.
double condition_number(const Eigen::MatrixXd& precision);

/// Simulated counts: theta_j ~ N(mu_star, 1), y_j ~ Binomial(n, logistic(theta_j)),
/// drawn as n Bernoulli trials each.
std::vector<int> sample_dataset(int groups, int n, double mu_star, std::uint64_t seed);

/// CSV with header `group,y,n`.
void write_dataset_csv(const std::filesystem::path& path, int n, const std::vector<int>& y);
/// Returns (n, y). All rows must share one n.
std::pair<int, std::vector<int>> read_dataset_csv(const std::filesystem::path& path);

}  // namespace mwg
