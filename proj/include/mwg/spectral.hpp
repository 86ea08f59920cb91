#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mwg/potential.hpp"

namespace mwg::spectral {

// ---------------------------------------------------------------------------
// Closed-form constants of the one-dimensional RWM conductance bound.
// ---------------------------------------------------------------------------

/// Isoperimetric constant for log-concave measures, 6 * sqrt(3).
double isoperimetric_k();

/// Acceptance lower bound b(c) = phi_c(3/2) e^{-2.6} / 2, phi_c the N(0, c)
/// density. Throws std::domain_error for c <= 0.
double b_of_c(double c);

/// Conductance lower bound k(c) = min{b/8, b^2 sqrt(c) / (16 K)}.
double k_of_c(double c);

/// Spectral gap lower bound k(c)^2 / 2 obtained through Cheeger's inequality.
double gap_bound(double c);

/// min{alpha0/8, alpha0^2 sigma / (16 K spread)} with spread = sqrt(E|X - EX|^2).
double conductance_bound_a(double alpha0, double sigma, double spread);

/// ceil((kappa* d / C) log(d2_init / eps)): iterations sufficient for a chi^2
/// distance (square root) below eps from an initial distance d2_init.
long long mixing_time_bound(double kappa_star, long long d, double C, double d2_init, double eps);

// ---------------------------------------------------------------------------
// Acceptance-rate oracle.
// ---------------------------------------------------------------------------

struct Grid1D {
  std::vector<double> points;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const { return points.size(); }
  double spacing() const { return (hi - lo) / static_cast<double>(points.size() - 1); }
};

/// `n` equally spaced points on [lo, hi], n >= 2.
Grid1D make_grid(double lo, double hi, std::size_t n);

/// n points on [mode - w s, mode + w s], s the standard deviation of exp(-u).
/// Each side is clipped to the sublevel set {u <= u* + 40}.
Grid1D default_grid(const Potential1D& pot, std::size_t n = 401, double half_width_sds = 8.0);

/// a(x) = E min{1, pi(x + Z) / pi(x)}, Z ~ N(0, sigma^2), by quadrature. The
/// region where the proposal moves downhill in u contributes a closed-form
/// Gaussian probability; the remaining tails are integrated adaptively.
double acceptance_rate_at(const Potential1D& pot, double x, double sigma,
                          double abs_tol = 1e-10);

/// min over grid points of a(x) with sigma^2 = c Var(pi).
double min_acceptance(const Potential1D& pot, double c, const Grid1D& grid);

struct U1Check {
  double minimizer = 0.0;
  double s = 0.0;      // standard deviation of exp(-u)
  double value = 0.0;  // min{U(-s), U(s)} for the recentred potential
};

/// Recentres u at its minimizer (value 0) and evaluates it one standard
/// deviation either side.
U1Check u1_check(const Potential1D& pot);

// ---------------------------------------------------------------------------
// Discretized kernels.
// ---------------------------------------------------------------------------

/// Row-stochastic matrix with its stationary weights.
struct DiscreteKernel {
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;

  std::size_t size() const { return static_cast<std::size_t>(pi.size()); }
};

/// RWM kernel on `grid`: P_ij = spacing * phi_sigma(x_j - x_i) min{1, pi_j/pi_i}
/// off the diagonal, rejection mass on the diagonal, pi_i proportional to
/// exp(-u(x_i)). Throws std::domain_error on a negative diagonal.
DiscreteKernel discretize_rwm(const Potential1D& pot, double sigma, const Grid1D& grid);

/// Exact draws from the discretized density: every row equals pi.
DiscreteKernel discretize_exact(const Potential1D& pot, const Grid1D& grid);

/// Largest |pi_i P_ij - pi_j P_ji| relative to max(pi_i P_ij, pi_j P_ji, tiny).
double detailed_balance_error(const DiscreteKernel& k);
/// Largest |row sum - 1|.
double row_sum_error(const DiscreteKernel& k);

/// 1 - lambda_2 with lambda_2 the second largest eigenvalue of the
/// symmetrized matrix diag(pi)^{1/2} P diag(pi)^{-1/2}.
double spectral_gap(const DiscreteKernel& k);

struct ConductanceResult {
  double value = 0.0;
  /// True when every nontrivial subset was examined. False means the value
  /// is the minimum over threshold cuts only, which upper-bounds the true
  /// conductance.
  bool exact = false;
};

/// Exact conductance by enumerating all 2^{n-1} - 1 cuts (Gray-code order)
/// when n <= exhaustive_limit, otherwise the threshold-cut minimum.
ConductanceResult conductance(const DiscreteKernel& k, std::size_t exhaustive_limit = 20);
double exhaustive_conductance(const DiscreteKernel& k);
/// Minimum over cuts {x_0..x_i} | {x_{i+1}..x_{n-1}} of the ordered states.
double threshold_conductance(const DiscreteKernel& k);

// ---------------------------------------------------------------------------
// Two-dimensional Gaussian: Gibbs vs Metropolis-within-Gibbs.
// ---------------------------------------------------------------------------

enum class ConditionalUpdate { Exact, Rwm };

/// Random-scan coordinate kernel on a product grid, P = (P_1 + P_2) / 2, stored
/// as the symmetrized one-dimensional kernel of every grid slice. State index
/// is i + n1 * j for grid point (x1_i, x2_j).
class ProductKernel2D {
 public:
  ProductKernel2D(Grid1D axis1, Grid1D axis2, Eigen::VectorXd pi,
                  std::vector<DiscreteKernel> slices1, std::vector<DiscreteKernel> slices2);

  std::size_t size() const { return static_cast<std::size_t>(pi_.size()); }
  const Eigen::VectorXd& pi() const { return pi_; }
  const std::vector<DiscreteKernel>& slices(int axis) const { return axis == 0 ? s1_ : s2_; }

  /// y = S v with S the symmetrized kernel.
  void apply_symmetrized(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

  /// Dense transition matrix (small grids only).
  Eigen::MatrixXd to_dense() const;

  /// 1 - lambda_2 computed by Lanczos on the complement of sqrt(pi).
  double spectral_gap() const;

 private:
  Grid1D g1_, g2_;
  Eigen::VectorXd pi_;
  std::vector<DiscreteKernel> s1_, s2_;
  std::vector<Eigen::MatrixXd> sym1_, sym2_;
};

/// Grid covering +-8 marginal standard deviations on each axis of N(0, A^{-1}).
std::pair<Grid1D, Grid1D> gaussian_grid_2d(const Eigen::Matrix2d& precision,
                                           std::size_t per_axis);

/// Builds the random-scan kernel whose coordinate-m update is either an exact
/// draw from the discretized conditional or an RWM step with
/// sigma_m^2 = c / A_mm (c times the exact conditional variance).
ProductKernel2D build_coordinate_kernel_2d(const Eigen::Matrix2d& precision,
                                           std::size_t per_axis, ConditionalUpdate update,
                                           double c = 1.0);

struct DecompositionReport {
  double kappa_star = 0.0;
  double gap_gs = 0.0;
  double gap_mwg = 0.0;
  double inf_conditional_gap = 0.0;
  double lower_bound = 0.0;  // inf_conditional_gap * gap_gs
  bool lower_ok = false;     // gap_mwg >= lower_bound - tol
  bool upper_ok = false;     // gap_mwg <= gap_gs + tol
};

/// Gap(MwG) >= inf_z Gap(P^z) Gap(GS) and Gap(MwG) <= Gap(GS) on a discretized
/// bivariate Gaussian.
DecompositionReport decomposition_check_2d(const Eigen::Matrix2d& precision, double c,
                                           std::size_t per_axis, double tol = 1e-3);

/// Largest eigenvalue of a symmetric operator restricted to the orthogonal
/// complement of `top` (unit norm), by Lanczos with full reorthogonalization.
double lanczos_second_eigenvalue(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    const Eigen::VectorXd& top, int max_iter = 400, double tol = 1e-11);

}  // namespace mwg::spectral
