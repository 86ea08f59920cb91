#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mwg/kernel.hpp"
#include "mwg/model.hpp"

namespace mwg {

/// One Robbins-Monro step on the log proposal variance:
///   log_var + t^{-step_exponent} * (1{accepted} - target_rate),
/// clamped to [log 1e-12, log 1e12]. Requires t >= 1.
double rm_update(double log_var, bool accepted, long long t, double target_rate = 0.4,
                 double step_exponent = 0.7);

/// Empirical marginal variances from a pilot run.
struct PilotEstimate {
  std::vector<double> variances;
  int pilot_iters = 0;
  std::uint64_t seed = 0;
};

/// Runs the approximate Gibbs chain (20 RWM steps per coordinate update,
/// sigma^2 = 25 / L_m) for `pilot_iters` sweeps from the model's initial
/// state and returns the sample variance of each coordinate over the second
/// half. Throws NumericError if any coordinate has zero variance.
PilotEstimate pilot_variance(const TargetModel& model, int pilot_iters, std::uint64_t seed);

/// CSV `coord,variance`.
void write_pilot_csv(const std::filesystem::path& path, const PilotEstimate& est);
std::vector<double> read_pilot_csv(const std::filesystem::path& path);

}  // namespace mwg
