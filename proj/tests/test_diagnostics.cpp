#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mwg/diagnostics.hpp"
#include "mwg/errors.hpp"

using namespace mwg;

namespace {

std::vector<double> ar1(double rho, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  double v = g(rng) / std::sqrt(1 - rho * rho);
  for (int i = 0; i < n; ++i) {
    v = rho * v + g(rng);
    x[i] = v;
  }
  return x;
}

}  // namespace

TEST_CASE("batch means on iid and AR(1) series") {
  const int n = 100000;
  auto iid = ar1(0.0, n, 1);
  double ratio = ess_batch_means(iid) / n;
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  CHECK(iat(iid) == doctest::Approx(1.0).epsilon(0.1));

  // sum of autocorrelations: (1 + rho) / (1 - rho) = 3
  auto x = ar1(0.5, n, 2);
  CHECK(iat(x) == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("duplicating every sample doubles the IAT") {
  auto x = ar1(0.5, 50000, 3);
  std::vector<double> dup;
  for (double v : x) {
    dup.push_back(v);
    dup.push_back(v);
  }
  CHECK(iat(dup) / iat(x) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("ESS identities") {
  auto x = ar1(0.3, 10007, 4);
  double e = ess_batch_means(x);
  CHECK(iat(x) * e == doctest::Approx(10007.0).epsilon(1e-14));

  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return -3.5 * v + 100.0; });
  CHECK(ess_batch_means(y) == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("ESS errors") {
  std::vector<double> flat(1000, 2.0);
  CHECK_THROWS_AS(ess_batch_means(flat), NumericError);
  std::vector<double> short_series(99, 0.0);
  for (std::size_t i = 0; i < short_series.size(); ++i) short_series[i] = double(i % 7);
  CHECK_THROWS(ess_batch_means(short_series));
}

TEST_CASE("max IAT over coordinates") {
  ChainTrace tr;
  tr.samples.resize(5000, 3);
  auto a = ar1(0.0, 5000, 5), b = ar1(0.8, 5000, 6), c = ar1(0.4, 5000, 7);
  for (int i = 0; i < 5000; ++i) tr.samples.row(i) << a[i], b[i], c[i];
  auto r = max_iat(tr);
  CHECK(r.per_coordinate_iat.size() == 3);
  CHECK(r.argmax == 1);
  CHECK(r.max_iat == *std::max_element(r.per_coordinate_iat.begin(), r.per_coordinate_iat.end()));
  CHECK(r.n_samples == 5000);
  for (double v : r.per_coordinate_iat) CHECK(v >= 0.0);

  ChainTrace perm;
  perm.samples.resize(5000, 3);
  perm.samples.col(0) = tr.samples.col(2);
  perm.samples.col(1) = tr.samples.col(0);
  perm.samples.col(2) = tr.samples.col(1);
  CHECK(max_iat(perm).max_iat == r.max_iat);

  ChainTrace one;
  one.samples = tr.samples.col(2);
  CHECK(max_iat(one).max_iat == r.per_coordinate_iat[2]);
}

TEST_CASE("median and quantiles") {
  CHECK(median_over_reps({1, 2, 3}) == 2.0);
  CHECK(median_over_reps({1, 2, 3, 4}) == 2.5);
  CHECK(median_over_reps({4, 1, 3, 2}) == 2.5);
  CHECK(median_over_reps({3, 1, 2}) == 2.0);
  CHECK_THROWS(median_over_reps({}));
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
}
