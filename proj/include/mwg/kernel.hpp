#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mwg/model.hpp"
#include "mwg/rng.hpp"

namespace mwg {

inline constexpr double kMinProposalVariance = 1e-12;
inline constexpr double kMaxProposalVariance = 1e12;

/// Proposal standard deviations given directly, one per coordinate.
struct FixedSigma {
  std::vector<double> sigma;
};

/// sigma_m^2 = c * v_m with v_m an estimated marginal variance.
struct PilotVariance {
  double c = 1.0;
  std::vector<double> variances;
};

/// Per-coordinate log-variance driven toward a target acceptance rate while
/// adapting; frozen afterwards.
struct RobbinsMonro {
  std::vector<double> log_variance;
  std::vector<std::uint64_t> updates;
  double target_rate = 0.4;
  double step_exponent = 0.7;
  bool frozen = false;
};

/// sigma_m^2 = numerator / L_m.
struct SmoothnessScaled {
  double numerator = 25.0;
  std::vector<double> smoothness;
};

/// Per-coordinate proposal variance rule.
class ProposalPolicy {
 public:
  using Rule = std::variant<FixedSigma, PilotVariance, RobbinsMonro, SmoothnessScaled>;

  /// Validates the rule: every realized variance must be positive and finite.
  /// Values are clamped to [1e-12, 1e12] when read.
  explicit ProposalPolicy(Rule rule);

  static ProposalPolicy fixed(std::vector<double> sigma);
  static ProposalPolicy pilot(std::vector<double> variances, double c = 1.0);
  static ProposalPolicy robbins_monro(std::vector<double> initial_variances,
                                      double target_rate = 0.4, double step_exponent = 0.7);
  static ProposalPolicy smoothness_scaled(std::vector<double> smoothness,
                                          double numerator = 25.0);
  static ProposalPolicy smoothness_scaled(const TargetModel& model, double numerator = 25.0);

  std::size_t dim() const;
  double variance(std::size_t m) const;
  double sigma(std::size_t m) const;

  /// Feeds one acceptance indicator for coordinate m (no-op unless the rule
  /// adapts and is not frozen).
  void record(std::size_t m, bool accepted);
  void freeze();
  bool adapting() const;

  const Rule& rule() const { return rule_; }

 private:
  Rule rule_;
};

/// Mutable state of one chain. Confined to one thread.
struct ChainState {
  ChainState(std::vector<double> x0, std::uint64_t seed);

  std::vector<double> x;
  std::uint64_t step_count = 0;
  Rng rng;
  std::vector<std::uint64_t> accepts;
  std::vector<std::uint64_t> proposals;
};

/// Accepts with probability min{1, exp(log_ratio)}. Throws NumericError on NaN.
/// Consumes one uniform only when 0 > log_ratio > -inf.
bool mh_accept(double log_ratio, Rng& rng);

struct RwmResult {
  double x = 0.0;
  bool accepted = false;
};

/// Metropolis decision for a given proposal y from x.
RwmResult rwm_transition(double x, double y, const Potential1D& pot, Rng& rng);

/// One random walk Metropolis step with N(x, sigma^2) proposal.
RwmResult rwm_step(double x, const Potential1D& pot, double sigma, Rng& rng);

/// Updates coordinate m: an exact draw if the model offers one, otherwise
/// `inner_steps` RWM steps against the conditional potential.
void update_coordinate(ChainState& state, const TargetModel& model, ProposalPolicy& policy,
                       std::size_t m, int inner_steps = 1);

/// Picks m uniformly and calls update_coordinate. Returns m.
std::size_t random_scan_step(ChainState& state, const TargetModel& model,
                             ProposalPolicy& policy, int inner_steps = 1);

/// `inner_steps` consecutive RWM steps on coordinate m; the surrogate for an
/// exact Gibbs update when the conditional cannot be sampled directly.
void approx_gibbs_update(ChainState& state, const TargetModel& model, std::size_t m,
                         ProposalPolicy& policy, int inner_steps = 20);

struct ChainTrace {
  Eigen::MatrixXd samples;  // iterations x d, one row per sweep
  std::vector<std::uint64_t> accept_counts;
  std::vector<std::uint64_t> proposal_counts;
  std::optional<ProposalPolicy> policy;  // state after the run

  double acceptance_rate(std::size_t m) const;
};

struct RunOptions {
  int burnin = 1000;
  int iters = 4000;
  std::uint64_t seed = 0;
  int inner_steps = 1;
  std::optional<std::vector<double>> initial;
};

/// Runs burnin + iters sweeps of d random-scan picks each and stores the state
/// after every post-burn-in sweep. Adaptation is frozen at the end of burn-in
/// and acceptance counters cover the sampling phase only. Throws
/// std::runtime_error naming the coordinate and sweep if a coordinate becomes
/// non-finite.
ChainTrace run_chain(const TargetModel& model, ProposalPolicy policy, const RunOptions& opts);

/// CSV `iter,coord_0,...,coord_{d-1}`.
void write_trace_csv(const std::filesystem::path& path, const ChainTrace& trace);
/// CSV `coord,accepts,proposals,rate`.
void write_acceptance_csv(const std::filesystem::path& path, const ChainTrace& trace);

}  // namespace mwg
