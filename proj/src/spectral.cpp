#include "mwg/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mwg/errors.hpp"
#include "mwg/quadrature.hpp"

namespace mwg::spectral {
namespace {

double normal_density(double z, double sigma) {
  return std::exp(-0.5 * (z / sigma) * (z / sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Other endpoint of the sublevel set {t : u(t) <= level}, searching from `x`
// in direction `dir`.
double sublevel_endpoint(const Potential1D& pot, double x, double level, double dir) {
  double step = 1e-6 * std::max(1.0, std::abs(x));
  double inside = x + dir * step;
  if (pot.u(inside) > level) return x;
  double outside = inside;
  while (pot.u(outside) <= level) {
    inside = outside;
    step *= 2.0;
    outside = x + dir * step;
    if (step > 1e8) throw NumericError("sublevel_endpoint: potential does not grow");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (pot.u(mid) <= level) inside = mid; else outside = mid;
  }
  return inside;
}

}  // namespace

double isoperimetric_k() { return 6.0 * std::sqrt(3.0); }

double b_of_c(double c) {
  if (!(c > 0) || !std::isfinite(c)) throw std::domain_error("b_of_c: c must be positive");
  double phi = std::exp(-9.0 / (8.0 * c)) / std::sqrt(2.0 * std::numbers::pi * c);
  return phi * std::exp(-2.6) / 2.0;
}

double k_of_c(double c) {
  double b = b_of_c(c);
  return std::min(b / 8.0, b * b * std::sqrt(c) / (16.0 * isoperimetric_k()));
}

double gap_bound(double c) {
  double k = k_of_c(c);
  return 0.5 * k * k;
}

double conductance_bound_a(double alpha0, double sigma, double spread) {
  if (!(alpha0 > 0 && alpha0 <= 1)) throw std::domain_error("conductance_bound_a: alpha0 in (0, 1]");
  if (!(sigma > 0) || !(spread > 0)) {
    throw std::domain_error("conductance_bound_a: sigma and spread must be positive");
  }
  return std::min(alpha0 / 8.0, alpha0 * alpha0 * sigma / (16.0 * isoperimetric_k() * spread));
}

long long mixing_time_bound(double kappa_star, long long d, double C, double d2_init,
                            double eps) {
  if (!(kappa_star > 0) || d <= 0 || !(C > 0) || !(d2_init > 0) || !(eps > 0)) {
    throw std::domain_error("mixing_time_bound: arguments must be positive");
  }
  if (!(eps < d2_init)) throw std::domain_error("mixing_time_bound: need eps < d2_init");
  double n = kappa_star * static_cast<double>(d) / C * std::log(d2_init / eps);
  // Absorb last-ulp noise from log() so exact integers are not bumped up.
  return static_cast<long long>(std::ceil(n * (1.0 - 4.0 * std::numeric_limits<double>::epsilon())));
}

Grid1D make_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw std::domain_error("make_grid: need n >= 2 and hi > lo");
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.points[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

Grid1D default_grid(const Potential1D& pot, std::size_t n, double half_width_sds) {
  auto m = moments_1d(pot);
  double s = std::sqrt(m.variance);
  double lo = m.support.mode - half_width_sds * s, hi = m.support.mode + half_width_sds * s;
  // Clip a steep side where exp(-u) would sit far below double resolution.
  const double level = pot.u(m.support.mode) + 40.0;
  if (pot.u(lo) > level) lo = sublevel_endpoint(pot, m.support.mode, level, -1.0);
  if (pot.u(hi) > level) hi = sublevel_endpoint(pot, m.support.mode, level, +1.0);
  return make_grid(lo, hi, n);
}

double acceptance_rate_at(const Potential1D& pot, double x, double sigma, double abs_tol) {
  if (!(sigma > 0)) throw std::domain_error("acceptance_rate_at: sigma must be positive");
  const double ux = pot.u(x);
  const double g = pot.du(x);
  // Sublevel set [l, r] of u through x: proposals inside are always accepted.
  double l = x, r = x;
  if (g > 0) l = sublevel_endpoint(pot, x, ux, -1.0);
  if (g < 0) r = sublevel_endpoint(pot, x, ux, +1.0);
  double accept = normal_cdf((r - x) / sigma) - normal_cdf((l - x) / sigma);

  auto tail = [&](double t) { return std::exp(ux - pot.u(t)) * normal_density(t - x, sigma); };
  const double reach = 12.0 * sigma;
  if (r < x + reach) accept += adaptive_simpson(tail, r, x + reach, 0.5 * abs_tol, 16).value;
  if (l > x - reach) accept += adaptive_simpson(tail, x - reach, l, 0.5 * abs_tol, 16).value;
  return accept;
}

double min_acceptance(const Potential1D& pot, double c, const Grid1D& grid) {
  if (!(c > 0)) throw std::domain_error("min_acceptance: c must be positive");
  double sigma = std::sqrt(c * var_1d(pot));
  double best = std::numeric_limits<double>::infinity();
  for (double x : grid.points) best = std::min(best, acceptance_rate_at(pot, x, sigma));
  return best;
}

U1Check u1_check(const Potential1D& pot) {
  U1Check out;
  out.minimizer = find_minimizer(pot);
  double u0 = pot.u(out.minimizer);
  out.s = std::sqrt(var_1d(pot));
  out.value = std::min(pot.u(out.minimizer - out.s), pot.u(out.minimizer + out.s)) - u0;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd potential_values(const Potential1D& pot, const Grid1D& grid) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) u(static_cast<Eigen::Index>(i)) = pot.u(grid.points[i]);
  return u;
}

Eigen::VectorXd weights_from_potential(const Eigen::VectorXd& u) {
  Eigen::VectorXd w = (-(u.array() - u.minCoeff())).exp();
  return w / w.sum();
}

Eigen::MatrixXd symmetrize(const DiscreteKernel& k) {
  Eigen::VectorXd r = k.pi.cwiseSqrt();
  Eigen::MatrixXd s = r.asDiagonal() * k.P * r.cwiseInverse().asDiagonal();
  return 0.5 * (s + s.transpose());
}

}  // namespace

DiscreteKernel discretize_rwm(const Potential1D& pot, double sigma, const Grid1D& grid) {
  if (!(sigma > 0)) throw std::domain_error("discretize_rwm: sigma must be positive");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.spacing();
  Eigen::VectorXd u = potential_values(pot, grid);
  DiscreteKernel k;
  k.pi = weights_from_potential(u);
  k.P.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double p = h * normal_density(grid.points[j] - grid.points[i], sigma) *
                 std::min(1.0, std::exp(u(i) - u(j)));
      k.P(i, j) = p;
      off += p;
    }
    double diag = 1.0 - off;
    if (diag < 0.0) {
      throw std::domain_error(
          "discretize_rwm: negative rejection mass; the grid is too coarse for sigma, use a "
          "finer grid");
    }
    k.P(i, i) = diag;
  }
  return k;
}

DiscreteKernel discretize_exact(const Potential1D& pot, const Grid1D& grid) {
  DiscreteKernel k;
  k.pi = weights_from_potential(potential_values(pot, grid));
  k.P = Eigen::VectorXd::Ones(k.pi.size()) * k.pi.transpose();
  return k;
}

double detailed_balance_error(const DiscreteKernel& k) {
  double worst = 0.0;
  const auto n = k.pi.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double a = k.pi(i) * k.P(i, j), b = k.pi(j) * k.P(j, i);
      double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  return worst;
}

double row_sum_error(const DiscreteKernel& k) {
  return (k.P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double spectral_gap(const DiscreteKernel& k) {
  if (k.size() < 2) throw std::domain_error("spectral_gap: need at least two states");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(k), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("spectral_gap: eigensolver failed");
  const auto& ev = es.eigenvalues();  // ascending
  return 1.0 - ev(ev.size() - 2);
}

// Flows are summed directly for each cut. Incremental updates cancel badly
// once the cut sits in a tail where pi is tiny.
double threshold_conductance(const DiscreteKernel& k) {
  const auto n = k.pi.size();
  if (n < 2) throw std::domain_error("conductance: need at least two states");
  Eigen::MatrixXd flow = k.pi.asDiagonal() * k.P;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c + 1 < n; ++c) {
    double out = flow.topRightCorner(c + 1, n - c - 1).sum();
    double mass = std::min(k.pi.head(c + 1).sum(), k.pi.tail(n - c - 1).sum());
    if (mass > 0) best = std::min(best, out / mass);
  }
  return best;
}

double exhaustive_conductance(const DiscreteKernel& k) {
  const auto n = static_cast<int>(k.pi.size());
  if (n < 2) throw std::domain_error("conductance: need at least two states");
  if (n > 30) throw std::domain_error("exhaustive_conductance: too many states");
  Eigen::MatrixXd flow = k.pi.asDiagonal() * k.P;
  // State 0 stays outside A; bit b of the Gray code toggles state b + 1.
  std::vector<int> inside, outside;
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::uint64_t gray = 0;
  for (std::uint64_t t = 1; t < count; ++t) {
    gray ^= std::uint64_t{1} << std::countr_zero(t);
    inside.clear();
    outside.assign(1, 0);
    for (int s = 1; s < n; ++s) ((gray >> (s - 1)) & 1 ? inside : outside).push_back(s);
    double out = 0.0, in_mass = 0.0, out_mass = 0.0;
    for (int i : inside) {
      in_mass += k.pi(i);
      for (int j : outside) out += flow(i, j);
    }
    for (int j : outside) out_mass += k.pi(j);
    double mass = std::min(in_mass, out_mass);
    if (mass > 0) best = std::min(best, out / mass);
  }
  return best;
}

ConductanceResult conductance(const DiscreteKernel& k, std::size_t exhaustive_limit) {
  if (k.size() <= exhaustive_limit) return {exhaustive_conductance(k), true};
  return {threshold_conductance(k), false};
}

// ---------------------------------------------------------------------------

double lanczos_second_eigenvalue(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    const Eigen::VectorXd& top, int max_iter, double tol) {
  const auto n = top.size();
  auto deflate = [&](Eigen::VectorXd& v) { v -= top * top.dot(v); };

  std::mt19937_64 gen(0x5eed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unif(gen);
  deflate(v);
  v.normalize();

  max_iter = static_cast<int>(std::min<Eigen::Index>(max_iter, n - 1));
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXd w(n);
  double ritz = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    apply(v, w);
    double a = v.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      deflate(w);
      for (const auto& q : basis) w -= q * q.dot(w);
    }
    double b = w.norm();

    const bool last = it + 1 == max_iter || b < 1e-14;
    if (it % 10 == 9 || last) {
      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      ritz = es.eigenvalues()(m - 1);
      double residual = b * std::abs(es.eigenvectors()(m - 1, m - 1));
      if (residual < tol || last) return ritz;
    }
    beta.push_back(b);
    v = w / b;
  }
  return ritz;
}

ProductKernel2D::ProductKernel2D(Grid1D axis1, Grid1D axis2, Eigen::VectorXd pi,
                                 std::vector<DiscreteKernel> slices1,
                                 std::vector<DiscreteKernel> slices2)
    : g1_(std::move(axis1)), g2_(std::move(axis2)), pi_(std::move(pi)),
      s1_(std::move(slices1)), s2_(std::move(slices2)) {
  if (s1_.size() != g2_.size() || s2_.size() != g1_.size() ||
      static_cast<std::size_t>(pi_.size()) != g1_.size() * g2_.size()) {
    throw std::domain_error("ProductKernel2D: inconsistent slice counts");
  }
  for (const auto& k : s1_) sym1_.push_back(symmetrize(k));
  for (const auto& k : s2_) sym2_.push_back(symmetrize(k));
}

void ProductKernel2D::apply_symmetrized(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  const auto n1 = static_cast<Eigen::Index>(g1_.size());
  const auto n2 = static_cast<Eigen::Index>(g2_.size());
  out.resize(v.size());
  Eigen::Map<const Eigen::MatrixXd> V(v.data(), n1, n2);
  Eigen::Map<Eigen::MatrixXd> O(out.data(), n1, n2);
  for (Eigen::Index j = 0; j < n2; ++j) O.col(j).noalias() = 0.5 * (sym1_[j] * V.col(j));
  for (Eigen::Index i = 0; i < n1; ++i) {
    O.row(i).noalias() += 0.5 * (sym2_[i] * V.row(i).transpose()).transpose();
  }
}

Eigen::MatrixXd ProductKernel2D::to_dense() const {
  const auto n1 = static_cast<Eigen::Index>(g1_.size());
  const auto n2 = static_cast<Eigen::Index>(g2_.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index i = 0; i < n1; ++i) {
      for (Eigen::Index k = 0; k < n1; ++k) P(i + n1 * j, k + n1 * j) += 0.5 * s1_[j].P(i, k);
      for (Eigen::Index k = 0; k < n2; ++k) P(i + n1 * j, i + n1 * k) += 0.5 * s2_[i].P(j, k);
    }
  }
  return P;
}

double ProductKernel2D::spectral_gap() const {
  Eigen::VectorXd top = pi_.cwiseSqrt();
  top.normalize();
  double lambda2 = lanczos_second_eigenvalue(
      [this](const Eigen::VectorXd& v, Eigen::VectorXd& out) { apply_symmetrized(v, out); }, top);
  return 1.0 - lambda2;
}

std::pair<Grid1D, Grid1D> gaussian_grid_2d(const Eigen::Matrix2d& precision,
                                           std::size_t per_axis) {
  Eigen::Matrix2d cov = precision.inverse();
  double s1 = std::sqrt(cov(0, 0)), s2 = std::sqrt(cov(1, 1));
  return {make_grid(-8.0 * s1, 8.0 * s1, per_axis), make_grid(-8.0 * s2, 8.0 * s2, per_axis)};
}

ProductKernel2D build_coordinate_kernel_2d(const Eigen::Matrix2d& precision,
                                           std::size_t per_axis, ConditionalUpdate update,
                                           double c) {
  if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      precision(0, 0) <= 0 || precision.determinant() <= 0) {
    throw std::domain_error("build_coordinate_kernel_2d: precision must be SPD");
  }
  auto [g1, g2] = gaussian_grid_2d(precision, per_axis);
  const double a11 = precision(0, 0), a22 = precision(1, 1), a12 = precision(0, 1);

  auto slice = [&](double cond_mean, double prec, const Grid1D& grid) {
    auto pot = potentials::gaussian(cond_mean, 1.0 / prec);
    return update == ConditionalUpdate::Exact ? discretize_exact(pot, grid)
                                              : discretize_rwm(pot, std::sqrt(c / prec), grid);
  };
  std::vector<DiscreteKernel> s1, s2;
  for (double x2 : g2.points) s1.push_back(slice(-a12 * x2 / a11, a11, g1));
  for (double x1 : g1.points) s2.push_back(slice(-a12 * x1 / a22, a22, g2));

  const auto n1 = static_cast<Eigen::Index>(g1.size());
  const auto n2 = static_cast<Eigen::Index>(g2.size());
  Eigen::VectorXd logw(n1 * n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index i = 0; i < n1; ++i) {
      double x1 = g1.points[i], x2 = g2.points[j];
      logw(i + n1 * j) = -0.5 * (a11 * x1 * x1 + 2.0 * a12 * x1 * x2 + a22 * x2 * x2);
    }
  }
  Eigen::VectorXd pi = (logw.array() - logw.maxCoeff()).exp();
  pi /= pi.sum();
  return ProductKernel2D(std::move(g1), std::move(g2), std::move(pi), std::move(s1), std::move(s2));
}

DecompositionReport decomposition_check_2d(const Eigen::Matrix2d& precision, double c,
                                           std::size_t per_axis, double tol) {
  DecompositionReport rep;
  Eigen::MatrixXd a = precision;
  Eigen::VectorXd inv_sqrt = a.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
  rep.kappa_star = std::max(1.0, 1.0 / es.eigenvalues().minCoeff());

  auto gs = build_coordinate_kernel_2d(precision, per_axis, ConditionalUpdate::Exact);
  auto mwg = build_coordinate_kernel_2d(precision, per_axis, ConditionalUpdate::Rwm, c);
  rep.gap_gs = gs.spectral_gap();
  rep.gap_mwg = mwg.spectral_gap();
  rep.inf_conditional_gap = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    for (const auto& k : mwg.slices(axis)) {
      rep.inf_conditional_gap = std::min(rep.inf_conditional_gap, spectral_gap(k));
    }
  }
  rep.lower_bound = rep.inf_conditional_gap * rep.gap_gs;
  rep.lower_ok = rep.gap_mwg >= rep.lower_bound - tol;
  rep.upper_ok = rep.gap_mwg <= rep.gap_gs + tol;
  return rep;
}

}  // namespace mwg::spectral
