#pragma once

#include <span>
#include <string>
#include <vector>

#include "mwg/kernel.hpp"

namespace mwg {

/// Batch-means effective sample size with batch size b = floor(sqrt(N)) and
/// a = floor(N / b) batches over the leading a*b samples:
///   ESS = N * s^2 / (b * var(batch means)).
/// Requires N >= 100; throws NumericError on a constant series.
double ess_batch_means(std::span<const double> series);

/// Integrated autocorrelation time N / ESS.
double iat(std::span<const double> series);

struct IatReport {
  std::vector<double> per_coordinate_iat;
  double max_iat = 0.0;
  std::size_t argmax = 0;
  long n_samples = 0;
  std::string method = "batch_means_sqrt";
};

/// Per-coordinate IAT of the stored sweeps and their maximum.
IatReport max_iat(const ChainTrace& trace);

/// Median (mean of the two middle order statistics for even length).
double median_over_reps(std::vector<double> values);

/// Linear-interpolation quantile (R type 7), q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace mwg
