#include "mwg/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mwg/io.hpp"
#include "mwg/rng.hpp"

namespace mwg {

UnivariateTarget::UnivariateTarget(Potential1D pot, double smoothness)
    : pot_(std::move(pot)), smoothness_(smoothness) {
  if (!(smoothness > 0)) throw std::domain_error("UnivariateTarget: smoothness must be positive");
}

Potential1D UnivariateTarget::cond_potential(std::size_t m, std::span<const double>) const {
  if (m != 0) throw std::out_of_range("UnivariateTarget: coordinate out of range");
  return pot_;
}

std::vector<double> UnivariateTarget::initial_state() const {
  return {pot_.mode_hint.value_or(0.0)};
}

// --- Gaussian -------------------------------------------------------------

namespace {

void require_spd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::domain_error("precision matrix must be square and non-empty");
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::domain_error("precision matrix is not symmetric within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0) {
    throw std::domain_error("precision matrix is not positive definite");
  }
}

}  // namespace

GaussianTarget::GaussianTarget(Eigen::MatrixXd precision, bool exact_updates)
    : precision_(std::move(precision)), exact_updates_(exact_updates) {
  require_spd(precision_);
}

GaussianConditional GaussianTarget::conditional(std::size_t m, std::span<const double> x) const {
  const auto d = dim();
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (k != m) s += precision_(m, k) * x[k];
  }
  double amm = precision_(m, m);
  return {-s / amm, 1.0 / amm};
}

Potential1D GaussianTarget::cond_potential(std::size_t m, std::span<const double> x) const {
  auto c = conditional(m, x);
  auto p = potentials::gaussian(c.mean, c.variance);
  p.name = "gaussian_conditional";
  return p;
}

std::optional<GaussianConditional> GaussianTarget::exact_cond(std::size_t m,
                                                              std::span<const double> x) const {
  if (!exact_updates_) return std::nullopt;
  return conditional(m, x);
}

double kappa_star_gaussian(const Eigen::MatrixXd& precision) {
  require_spd(precision);
  Eigen::VectorXd inv_sqrt = precision.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * precision * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
  return std::max(1.0, 1.0 / es.eigenvalues().minCoeff());
}

double condition_number(const Eigen::MatrixXd& precision) {
  require_spd(precision);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precision, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

// --- hierarchical logistic -----------------------------------------------

Potential1D logistic_cond_potential(int y, int n, double mu) {
  if (n < 0 || y < 0 || y > n) {
    std::ostringstream msg;
    msg << "logistic_cond_potential: need 0 <= y <= n, got y=" << y << ", n=" << n;
    throw std::domain_error(msg.str());
  }
  const double yd = y, nd = n;
  Potential1D p;
  p.u = [=](double t) { return -yd * t + nd * softplus(t) + 0.5 * (t - mu) * (t - mu); };
  p.du = [=](double t) { return -yd + nd * sigmoid(t) + (t - mu); };
  p.mode_hint = mu;
  p.name = "logistic";
  return p;
}

GaussianConditional mu_cond_params(std::span<const double> theta) {
  if (theta.empty()) throw std::domain_error("mu_cond_params: theta must be non-empty");
  double s = 0.0;
  for (double t : theta) s += t;
  double denom = static_cast<double>(theta.size()) + 1.0;
  return {s / denom, 1.0 / denom};
}

double condition_number_logistic(int n) {
  if (n < 0) throw std::domain_error("condition_number_logistic: n must be >= 0");
  return 1.0 + n / 4.0;
}

HierLogisticPosterior::HierLogisticPosterior(int n, std::vector<int> y) : n_(n), y_(std::move(y)) {
  if (y_.empty()) throw std::domain_error("HierLogisticPosterior: need at least one group");
  if (n_ < 0) throw std::domain_error("HierLogisticPosterior: n must be >= 0");
  for (int v : y_) {
    if (v < 0 || v > n_) throw std::domain_error("HierLogisticPosterior: count outside [0, n]");
  }
}

Potential1D HierLogisticPosterior::cond_potential(std::size_t m, std::span<const double> x) const {
  if (m == 0) {
    auto c = mu_cond_params(x.subspan(1));
    auto p = potentials::gaussian(c.mean, c.variance);
    p.name = "mu_conditional";
    return p;
  }
  return logistic_cond_potential(y_[m - 1], n_, x[0]);
}

std::optional<GaussianConditional> HierLogisticPosterior::exact_cond(
    std::size_t m, std::span<const double> x) const {
  if (m != 0) return std::nullopt;
  return mu_cond_params(x.subspan(1));
}

double HierLogisticPosterior::coordinate_smoothness(std::size_t m) const {
  return m == 0 ? static_cast<double>(y_.size()) + 1.0 : condition_number_logistic(n_);
}

std::vector<int> sample_dataset(int groups, int n, double mu_star, std::uint64_t seed) {
  if (groups < 1 || n < 1) throw std::domain_error("sample_dataset: need groups >= 1, n >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> y(groups);
  for (int j = 0; j < groups; ++j) {
    double p = sigmoid(mu_star + normal(rng));
    int count = 0;
    for (int i = 0; i < n; ++i) count += unif(rng) < p ? 1 : 0;
    y[j] = count;
  }
  return y;
}

void write_dataset_csv(const std::filesystem::path& path, int n, const std::vector<int>& y) {
  std::ostringstream out;
  out << "group,y,n\n";
  for (std::size_t j = 0; j < y.size(); ++j) out << j << ',' << y[j] << ',' << n << '\n';
  io::write_text(path, out.str());
}

std::pair<int, std::vector<int>> read_dataset_csv(const std::filesystem::path& path) {
  auto rows = io::read_csv(path, "group,y,n");
  if (rows.empty()) throw std::runtime_error(path.string() + ": no groups");
  int n = -1;
  std::vector<int> y;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw std::runtime_error(path.string() + ": expected 3 columns");
    if (io::parse_int(row[0]) != static_cast<long long>(r)) {
      throw std::runtime_error(path.string() + ": groups must be numbered 0..J-1 in order");
    }
    int rn = static_cast<int>(io::parse_int(row[2]));
    if (n >= 0 && rn != n) throw std::runtime_error(path.string() + ": inconsistent n");
    n = rn;
    y.push_back(static_cast<int>(io::parse_int(row[1])));
  }
  HierLogisticPosterior check(n, y);  // validates ranges
  return {n, std::move(y)};
}

}  // namespace mwg
