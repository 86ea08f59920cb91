#include "mwg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mwg/errors.hpp"

namespace mwg {

double ess_batch_means(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 100) throw std::domain_error("ess_batch_means: need at least 100 samples");
  const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t a = n / b;

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  double sample_var = ss / static_cast<double>(n - 1);

  std::vector<double> batch(a, 0.0);
  for (std::size_t k = 0; k < a; ++k) {
    double s = 0.0;
    for (std::size_t i = k * b; i < (k + 1) * b; ++i) s += series[i];
    batch[k] = s / static_cast<double>(b);
  }
  double bmean = 0.0;
  for (double v : batch) bmean += v;
  bmean /= static_cast<double>(a);
  double bss = 0.0;
  for (double v : batch) bss += (v - bmean) * (v - bmean);
  double batch_var = bss / static_cast<double>(a - 1);

  if (!(sample_var > 0) || !(batch_var > 0)) {
    throw NumericError("ess_batch_means: zero variance");
  }
  return static_cast<double>(n) * sample_var / (static_cast<double>(b) * batch_var);
}

double iat(std::span<const double> series) {
  return static_cast<double>(series.size()) / ess_batch_means(series);
}

IatReport max_iat(const ChainTrace& trace) {
  const auto& s = trace.samples;
  if (s.rows() == 0 || s.cols() == 0) throw std::domain_error("max_iat: empty trace");
  IatReport rep;
  rep.n_samples = static_cast<long>(s.rows());
  std::vector<double> column(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index m = 0; m < s.cols(); ++m) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) column[static_cast<std::size_t>(i)] = s(i, m);
    double v = iat(column);
    rep.per_coordinate_iat.push_back(v);
    if (m == 0 || v > rep.max_iat) {
      rep.max_iat = v;
      rep.argmax = static_cast<std::size_t>(m);
    }
  }
  return rep;
}

double median_over_reps(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("median_over_reps: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::domain_error("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  double h = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace mwg
