#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mwg/diagnostics.hpp"
#include "mwg/errors.hpp"
#include "mwg/io.hpp"
#include "mwg/kernel.hpp"
#include "mwg/spectral.hpp"

using namespace mwg;

namespace {

// coordinate 0 jumps to +inf on its exact update
class Exploding final : public TargetModel {
 public:
  std::size_t dim() const override { return 2; }
  Potential1D cond_potential(std::size_t, std::span<const double>) const override {
    return potentials::gaussian();
  }
  std::optional<GaussianConditional> exact_cond(std::size_t m,
                                                std::span<const double>) const override {
    if (m == 0) return GaussianConditional{std::numeric_limits<double>::infinity(), 1.0};
    return std::nullopt;
  }
  double coordinate_smoothness(std::size_t) const override { return 1.0; }
};

}  // namespace

TEST_CASE("mh_accept") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(mh_accept(0.0, rng));
    CHECK(mh_accept(std::log(2.0), rng));
    CHECK_FALSE(mh_accept(-std::numeric_limits<double>::infinity(), rng));
  }
  CHECK_THROWS_AS(mh_accept(std::nan(""), rng), NumericError);

  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) hits += mh_accept(std::log(0.25), rng);
  CHECK(std::abs(hits / double(n) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("rwm step") {
  auto pot = potentials::gaussian();
  Rng rng(5);
  SUBCASE("uphill in density is always accepted") {
    for (int i = 0; i < 100; ++i) {
      auto r = rwm_transition(1.0, 0.0, pot, rng);
      CHECK(r.accepted);
      CHECK(r.x == 0.0);
    }
  }
  SUBCASE("acceptance at the mode is 1/sqrt(2)") {
    // E exp(-Z^2/2) for Z ~ N(0,1)
    const int n = 1000000;
    int acc = 0;
    for (int i = 0; i < n; ++i) acc += rwm_step(0.0, pot, 1.0, rng).accepted;
    CHECK(std::abs(acc / double(n) - 1 / std::sqrt(2.0)) < 0.002);
  }
  SUBCASE("translation leaves the accept pattern alone") {
    auto moved = pot.shifted(5.0);
    Rng a(9), b(9);
    int differ = 0;
    double xa = 0.3, xb = 5.3;
    for (int i = 0; i < 100000; ++i) {
      auto ra = rwm_step(xa, pot, 1.3, a);
      auto rb = rwm_step(xb, moved, 1.3, b);
      differ += ra.accepted != rb.accepted;
    }
    CHECK(differ <= 2);
  }
  SUBCASE("non-positive sigma") {
    CHECK_THROWS_AS(rwm_step(0.0, pot, 0.0, rng), std::domain_error);
    CHECK_THROWS_AS(rwm_step(0.0, pot, -1.0, rng), std::domain_error);
  }
}

TEST_CASE("proposal policy") {
  auto fixed = ProposalPolicy::fixed({2.0, 0.5});
  CHECK(fixed.dim() == 2);
  CHECK(fixed.sigma(0) == 2.0);
  CHECK(fixed.variance(1) == 0.25);
  CHECK_FALSE(fixed.adapting());

  auto pilot = ProposalPolicy::pilot({4.0}, 2.0);
  CHECK(pilot.variance(0) == 8.0);

  auto smooth = ProposalPolicy::smoothness_scaled(std::vector<double>{1.0, 129.0});
  CHECK(smooth.variance(1) == doctest::Approx(25.0 / 129));

  CHECK_THROWS(ProposalPolicy::fixed({0.0}));
  CHECK_THROWS(ProposalPolicy::fixed({-1.0}));
  CHECK_THROWS(ProposalPolicy::pilot({std::nan("")}));
  CHECK_THROWS(ProposalPolicy::smoothness_scaled(std::vector<double>{0.0}));

  SUBCASE("robbins-monro clamps and freezes") {
    auto rm = ProposalPolicy::robbins_monro({1.0});
    CHECK(rm.adapting());
    rm.record(0, true);
    CHECK(std::log(rm.variance(0)) == doctest::Approx(0.6));
    for (int i = 0; i < 2000000; ++i) rm.record(0, false);
    CHECK(rm.variance(0) >= kMinProposalVariance);
    rm.freeze();
    double v = rm.variance(0);
    rm.record(0, true);
    CHECK(rm.variance(0) == v);
    CHECK_FALSE(rm.adapting());
  }
}

TEST_CASE("random scan step") {
  auto pot = potentials::gaussian();
  SUBCASE("d = 1 is a single rwm step") {
    UnivariateTarget t(pot);
    auto policy = ProposalPolicy::fixed({1.5});
    ChainState s({0.2}, 77);
    Rng ref(77);
    double x = 0.2;
    for (int i = 0; i < 1000; ++i) {
      random_scan_step(s, t, policy);
      std::uniform_int_distribution<std::size_t> pick(0, 0);
      pick(ref);
      x = rwm_step(x, pot, 1.5, ref).x;
      REQUIRE(s.x[0] == x);
    }
  }
  SUBCASE("other coordinates untouched") {
    Eigen::MatrixXd a(3, 3);
    a << 2, 0.3, 0.1, 0.3, 1, 0.2, 0.1, 0.2, 1.5;
    GaussianTarget t(a);
    auto policy = ProposalPolicy::fixed({1, 1, 1});
    ChainState s({0.1, -0.2, 0.3}, 3);
    for (int i = 0; i < 500; ++i) {
      auto before = s.x;
      auto m = random_scan_step(s, t, policy);
      for (std::size_t k = 0; k < 3; ++k)
        if (k != m) REQUIRE(std::memcmp(&before[k], &s.x[k], sizeof(double)) == 0);
    }
    CHECK(s.step_count == 500);
  }
  SUBCASE("mu update is an exact conditional draw") {
    HierLogisticPosterior post(16, {3, 8, 12, 1});
    std::vector<double> x0{0.0, 0.5, -1.0, 2.0, 0.1};
    auto target = mu_cond_params(std::span<const double>(x0).subspan(1));
    auto policy = ProposalPolicy::smoothness_scaled(post);
    ChainState s(x0, 8);
    const int n = 100000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
      update_coordinate(s, post, policy, 0);
      m1 += s.x[0];
      m2 += s.x[0] * s.x[0];
    }
    m1 /= n;
    double var = m2 / n - m1 * m1;
    CHECK(std::abs(m1 - target.mean) < 3 * std::sqrt(target.variance / n));
    // var of the sample variance of a normal is 2 sigma^4 / n
    CHECK(std::abs(var - target.variance) < 3 * std::sqrt(2.0 / n) * target.variance);
  }
}

TEST_CASE("approximate gibbs update") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0.4, 0.4, 1;
  GaussianTarget t(a);
  SUBCASE("one inner step equals one coordinate update") {
    auto p1 = ProposalPolicy::fixed({0.8, 0.8});
    auto p2 = p1;
    ChainState s1({0.5, -0.5}, 21), s2({0.5, -0.5}, 21);
    for (int i = 0; i < 200; ++i) {
      approx_gibbs_update(s1, t, 1, p1, 1);
      update_coordinate(s2, t, p2, 1, 1);
      REQUIRE(s1.x == s2.x);
    }
  }
  SUBCASE("composite of 20 steps keeps detailed balance") {
    // three-point toy conditional: K^20 still reversible
    auto pot = potentials::gaussian();
    auto grid = spectral::make_grid(-1.0, 1.0, 3);
    auto k = spectral::discretize_rwm(pot, 0.6, grid);
    Eigen::MatrixXd k20 = Eigen::MatrixXd::Identity(3, 3);
    for (int i = 0; i < 20; ++i) k20 = k20 * k.P;
    for (int i = 0; i < 3; ++i) {
      CHECK(k20.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j < 3; ++j)
        CHECK(k.pi(i) * k20(i, j) == doctest::Approx(k.pi(j) * k20(j, i)).epsilon(1e-12));
    }
    Eigen::RowVectorXd moved = k.pi.transpose() * k20;
    for (int i = 0; i < 3; ++i) CHECK(moved(i) == doctest::Approx(k.pi(i)).epsilon(1e-12));
  }
  SUBCASE("inner steps must be positive") {
    auto p = ProposalPolicy::fixed({1, 1});
    ChainState s({0, 0}, 1);
    CHECK_THROWS(approx_gibbs_update(s, t, 0, p, 0));
  }
}

TEST_CASE("run chain") {
  UnivariateTarget t(potentials::gaussian());
  RunOptions opts;
  opts.burnin = 200;
  opts.iters = 4000;
  opts.seed = 99;
  auto a = run_chain(t, ProposalPolicy::fixed({2.4}), opts);
  auto b = run_chain(t, ProposalPolicy::fixed({2.4}), opts);
  CHECK(a.samples.rows() == 4000);
  CHECK(a.samples.cols() == 1);
  CHECK(a.samples == b.samples);
  CHECK(a.accept_counts == b.accept_counts);

  std::vector<double> s(a.samples.data(), a.samples.data() + a.samples.size());
  double tau = iat(s);
  double mean = a.samples.mean();
  CHECK(std::abs(mean) < 3 * std::sqrt(tau * 1.0 / s.size()));

  CHECK(a.proposal_counts[0] == 4000);
  CHECK(a.accept_counts[0] <= a.proposal_counts[0]);

  SUBCASE("acceptance with sigma^2 = Var stays above b(1)") {
    auto c = run_chain(t, ProposalPolicy::fixed({1.0}), opts);
    double rate = c.acceptance_rate(0);
    CHECK(rate >= spectral::b_of_c(1.0));
    CHECK(rate <= 1.0);
    CHECK(rate == doctest::Approx(0.70).epsilon(0.05));
  }
  SUBCASE("dimensions for a multivariate target") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(3, 3);
    opts.iters = 50;
    auto c = run_chain(GaussianTarget(p), ProposalPolicy::fixed({1, 1, 1}), opts);
    CHECK(c.samples.rows() == 50);
    CHECK(c.samples.cols() == 3);
    std::uint64_t total = 0;
    for (auto v : c.proposal_counts) total += v;
    CHECK(total == 150);
  }
  SUBCASE("divergence names the coordinate") {
    opts.burnin = 0;
    opts.iters = 10;
    try {
      run_chain(Exploding{}, ProposalPolicy::fixed({1, 1}), opts);
      FAIL("expected a runtime_error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("coordinate 0") != std::string::npos);
    }
  }
}

TEST_CASE("independent exact updates give lag-one correlation 1/2") {
  GaussianTarget t(Eigen::MatrixXd::Identity(2, 2), true);
  auto policy = ProposalPolicy::fixed({1, 1});
  ChainState s({0, 0}, 1234);
  // one random-scan pick per stored state
  const int n = 200000;
  std::vector<double> x0(n), x1(n);
  for (int i = 0; i < n; ++i) {
    random_scan_step(s, t, policy);
    x0[i] = s.x[0];
    x1[i] = s.x[1];
  }
  for (const auto* v : {&x0, &x1}) {
    double m = 0, c0 = 0, c1 = 0;
    for (double e : *v) m += e;
    m /= n;
    for (int i = 0; i < n; ++i) {
      c0 += ((*v)[i] - m) * ((*v)[i] - m);
      if (i + 1 < n) c1 += ((*v)[i] - m) * ((*v)[i + 1] - m);
    }
    double rho = c1 / c0;
    // se of a lag-1 autocorrelation near 1/2 under this chain is about 0.0035
    CHECK(std::abs(rho - 0.5) < 0.015);
  }
}

TEST_CASE("trace and acceptance csv") {
  UnivariateTarget t(potentials::gaussian());
  RunOptions opts;
  opts.burnin = 0;
  opts.iters = 3;
  auto tr = run_chain(t, ProposalPolicy::fixed({1.0}), opts);
  auto dir = std::filesystem::temp_directory_path() / "mwg_test_kernel";
  write_trace_csv(dir / "trace.csv", tr);
  write_acceptance_csv(dir / "acc.csv", tr);
  auto rows = io::read_csv(dir / "trace.csv", "iter,coord_0");
  CHECK(rows.size() == 3);
  CHECK(io::parse_double(rows[2][1]) == tr.samples(2, 0));
  auto acc = io::read_csv(dir / "acc.csv", "coord,accepts,proposals,rate");
  CHECK(acc.size() == 1);
  std::filesystem::remove_all(dir);
}
