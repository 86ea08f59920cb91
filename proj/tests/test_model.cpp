#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "mwg/errors.hpp"
#include "mwg/model.hpp"
#include "mwg/quadrature.hpp"

using namespace mwg;

namespace {

double central_diff(const Potential1D& p, double x, double h = 1e-5) {
  return (p.u(x + h) - p.u(x - h)) / (2 * h);
}

// plain trapezoid on a fixed fine grid, no adaptivity
double brute_variance(const std::function<double(double)>& u, double lo, double hi, int n) {
  double h = (hi - lo) / n, z = 0, m1 = 0, m2 = 0;
  for (int i = 0; i <= n; ++i) {
    double x = lo + i * h;
    double w = std::exp(-u(x)) * ((i == 0 || i == n) ? 0.5 : 1.0);
    z += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  m1 /= z;
  return m2 / z - m1 * m1;
}

Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = g(rng);
  Eigen::MatrixXd a = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("softplus is stable in both tails") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(-800.0) < 1e-300);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("logistic conditional potential") {
  SUBCASE("no data reduces to the prior") {
    auto p = logistic_cond_potential(0, 0, 0.0);
    CHECK(p.u(1.0) == doctest::Approx(0.5));
    CHECK(p.u(-2.0) == doctest::Approx(2.0));
  }
  SUBCASE("curvature at zero is 1 + n/4") {
    for (int n : {0, 4, 32, 512}) {
      for (int y : {0, n / 3, n}) {
        auto p = logistic_cond_potential(y, n, 0.0);
        double h = 1e-4;
        double curv = (p.du(h) - p.du(-h)) / (2 * h);
        CHECK(curv == doctest::Approx(1.0 + n / 4.0).epsilon(1e-6));
      }
    }
  }
  SUBCASE("derivative matches finite differences") {
    for (int n : {4, 64, 512}) {
      auto p = logistic_cond_potential(n / 4, n, 0.7);
      for (double t : {-3.0, 0.0, 3.0}) {
        double fd = central_diff(p, t);
        CHECK(std::abs(p.du(t) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
  SUBCASE("finite far out") {
    auto p = logistic_cond_potential(3, 10, 0.0);
    for (double t : {-700.0, 700.0}) {
      CHECK(std::isfinite(p.u(t)));
      CHECK(std::isfinite(p.du(t)));
    }
  }
  SUBCASE("second derivative bounded by 1 and 1 + n/4, peak at zero") {
    const int n = 64;
    auto p = logistic_cond_potential(20, n, 0.0);
    double best = -1, arg = 0, h = 1e-4;
    for (int i = 0; i <= 2000; ++i) {
      double t = -10 + i * 0.01;
      double s = (p.du(t + h) - p.du(t - h)) / (2 * h);
      CHECK(s >= 1.0 - 1e-6);
      CHECK(s <= 1.0 + n / 4.0 + 1e-6);
      if (s > best) best = s, arg = t;
    }
    CHECK(std::abs(arg) <= 0.01 + 1e-12);
  }
  SUBCASE("count out of range") {
    CHECK_THROWS_AS(logistic_cond_potential(-1, 4, 0.0), std::domain_error);
    CHECK_THROWS_AS(logistic_cond_potential(5, 4, 0.0), std::domain_error);
  }
}

TEST_CASE("mu conditional") {
  std::vector<double> zeros(5, 0.0);
  auto a = mu_cond_params(zeros);
  CHECK(a.mean == 0.0);
  CHECK(a.variance == doctest::Approx(1.0 / 6));

  std::vector<double> ones{1, 1, 1};
  auto b = mu_cond_params(ones);
  CHECK(b.mean == doctest::Approx(0.75));
  CHECK(b.variance == doctest::Approx(0.25));

  std::vector<double> other{-4, 2, 9};
  CHECK(mu_cond_params(other).variance == b.variance);

  CHECK_THROWS_AS(mu_cond_params(std::span<const double>{}), std::domain_error);
}

TEST_CASE("condition number of the logistic conditional") {
  CHECK(condition_number_logistic(4) == 2.0);
  CHECK(condition_number_logistic(512) == 129.0);
  CHECK(condition_number_logistic(0) == 1.0);
}

TEST_CASE("kappa star") {
  CHECK(kappa_star_gaussian(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  Eigen::MatrixXd diag = Eigen::Vector3d(0.5, 3.0, 40.0).asDiagonal();
  CHECK(kappa_star_gaussian(diag) == doctest::Approx(1.0));

  Eigen::MatrixXd a(2, 2);
  a << 1, 0.5, 0.5, 1;
  // eigenvalues of the unit-diagonal matrix are 1 +- 0.5
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CHECK(kappa_star_gaussian(a) == doctest::Approx(1.0 / es.eigenvalues().minCoeff()));
  CHECK(kappa_star_gaussian(a) == doctest::Approx(2.0));

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(kappa_star_gaussian(bad), std::domain_error);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.1, 0.2, 1;
  CHECK_THROWS_AS(kappa_star_gaussian(asym), std::domain_error);
}

TEST_CASE("kappa star never exceeds the classical condition number") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto a = random_spd(2 + rep % 5, rng);
    double ks = kappa_star_gaussian(a);
    CHECK(ks >= 1.0 - 1e-12);
    CHECK(ks <= condition_number(a) * (1 + 1e-12));
  }
}

TEST_CASE("variance of one-dimensional densities") {
  CHECK(var_1d(potentials::gaussian()) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(var_1d(logistic_cond_potential(0, 0, 0.0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(var_1d(potentials::gaussian(3.0, 2.5)) == doctest::Approx(2.5).epsilon(1e-8));

  // x^4: Gamma(3/4)/Gamma(1/4) in closed form, and a dense trapezoid
  double closed = std::tgamma(0.75) / std::tgamma(0.25);
  double brute = brute_variance([](double x) { return x * x * x * x; }, -6, 6, 2000000);
  CHECK(brute == doctest::Approx(closed).epsilon(1e-9));
  CHECK(var_1d(potentials::quartic()) == doctest::Approx(closed).epsilon(1e-8));

  // e^{-x} + x - 1 is a reflected Gumbel: variance pi^2/6
  CHECK(var_1d(potentials::exp_linear()) ==
        doctest::Approx(M_PI * M_PI / 6).epsilon(1e-8));
}

TEST_CASE("quadrature reports failure") {
  auto spike = [](double x) { return x == 0.5 ? 1e300 : std::sin(1e6 * x); };
  CHECK_THROWS_AS(adaptive_simpson(spike, 0.0, 1.0, 1e-14, 4, 4), NumericError);
  auto q = adaptive_simpson([](double x) { return std::exp(-x * x); }, -10, 10, 1e-12);
  CHECK(q.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("minimizer search") {
  CHECK(find_minimizer(potentials::gaussian(4.0, 1.0)) == doctest::Approx(4.0));
  CHECK(find_minimizer(potentials::exp_linear()) == doctest::Approx(0.0).epsilon(1e-9));
  Potential1D linear{[](double x) { return x; }, [](double) { return 1.0; }, {}, "linear"};
  CHECK_THROWS_AS(find_minimizer(linear), std::domain_error);
}

TEST_CASE("built-in family is convex") {
  auto fam = potentials::builtin_family();
  CHECK(fam.size() >= 7);
  for (const auto& p : fam) {
    auto m = moments_1d(p);
    double s = std::sqrt(m.variance);
    INFO(p.name);
    CHECK(du_non_decreasing(p, m.support.mode - 10 * s, m.support.mode + 10 * s));
    CHECK(potentials::by_name(p.name).name == p.name);
  }
  CHECK_THROWS_AS(potentials::by_name("nope"), std::invalid_argument);
}

TEST_CASE("simulated datasets") {
  auto a = sample_dataset(20, 64, 1.0, 42);
  auto b = sample_dataset(20, 64, 1.0, 42);
  CHECK(a == b);
  CHECK(a != sample_dataset(20, 64, 1.0, 43));
  for (int y : a) {
    CHECK(y >= 0);
    CHECK(y <= 64);
  }

  // E[logistic(theta)], theta ~ N(1, 1), from an independent stream
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(1.0, 1.0);
  double oracle = 0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) oracle += 1.0 / (1.0 + std::exp(-g(rng)));
  oracle /= draws;

  const int n = 32;
  auto y = sample_dataset(10000, n, 1.0, 7);
  double mean = 0;
  for (int v : y) mean += static_cast<double>(v) / n;
  mean /= y.size();
  CHECK(std::abs(mean - oracle) < 0.01);
}

TEST_CASE("dataset csv round trip") {
  auto dir = std::filesystem::temp_directory_path() / "mwg_test_model";
  auto y = sample_dataset(5, 16, 1.0, 3);
  write_dataset_csv(dir / "d.csv", 16, y);
  auto [n, back] = read_dataset_csv(dir / "d.csv");
  CHECK(n == 16);
  CHECK(back == y);
  std::filesystem::remove_all(dir);
}

TEST_CASE("hierarchical posterior layout") {
  HierLogisticPosterior post(64, {0, 10, 64});
  CHECK(post.dim() == 4);
  CHECK(post.coordinate_smoothness(0) == 4.0);
  CHECK(post.coordinate_smoothness(2) == 17.0);
  std::vector<double> x{0.3, 1.0, 2.0, -1.0};
  auto mu = post.exact_cond(0, x);
  REQUIRE(mu.has_value());
  CHECK(mu->mean == doctest::Approx(2.0 / 4));
  CHECK(mu->variance == doctest::Approx(0.25));
  CHECK_FALSE(post.exact_cond(1, x).has_value());
  // theta_2 conditional agrees with the standalone formula at mu = 0.3
  auto a = post.cond_potential(2, x);
  auto b = logistic_cond_potential(10, 64, 0.3);
  for (double t : {-1.0, 0.0, 2.5})
    CHECK(a.u(t) - a.u(0) == doctest::Approx(b.u(t) - b.u(0)));
  CHECK_THROWS_AS(HierLogisticPosterior(4, {5}), std::domain_error);
}

TEST_CASE("gaussian target conditionals") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 0.5, 0.5, 1;
  GaussianTarget t(a);
  std::vector<double> x{0.0, 2.0};
  auto c = t.conditional(0, x);
  CHECK(c.mean == doctest::Approx(-0.5 * 2.0 / 2.0));
  CHECK(c.variance == doctest::Approx(0.5));
  CHECK_FALSE(t.exact_cond(0, x).has_value());
  CHECK(GaussianTarget(a, true).exact_cond(0, x).has_value());
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 3, 3, 1;
  CHECK_THROWS_AS(GaussianTarget{bad}, std::domain_error);
}
