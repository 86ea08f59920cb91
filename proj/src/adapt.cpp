#include "mwg/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mwg/errors.hpp"
#include "mwg/io.hpp"

namespace mwg {

double rm_update(double log_var, bool accepted, long long t, double target_rate,
                 double step_exponent) {
  if (t < 1) throw std::domain_error("rm_update: t must be >= 1");
  double gain = std::pow(static_cast<double>(t), -step_exponent);
  double next = log_var + gain * ((accepted ? 1.0 : 0.0) - target_rate);
  return std::clamp(next, std::log(kMinProposalVariance), std::log(kMaxProposalVariance));
}

PilotEstimate pilot_variance(const TargetModel& model, int pilot_iters, std::uint64_t seed) {
  if (pilot_iters < 100) throw std::domain_error("pilot_variance: pilot_iters must be >= 100");
  RunOptions opts;
  opts.burnin = pilot_iters / 2;
  opts.iters = pilot_iters - opts.burnin;
  opts.seed = seed;
  opts.inner_steps = 20;
  auto trace = run_chain(model, ProposalPolicy::smoothness_scaled(model), opts);

  PilotEstimate est;
  est.pilot_iters = pilot_iters;
  est.seed = seed;
  const auto& s = trace.samples;
  for (Eigen::Index m = 0; m < s.cols(); ++m) {
    double mean = s.col(m).mean();
    double var = (s.col(m).array() - mean).square().sum() / static_cast<double>(s.rows() - 1);
    if (!(var > 0)) {
      std::ostringstream msg;
      msg << "pilot_variance: zero variance for coordinate " << m;
      throw NumericError(msg.str());
    }
    est.variances.push_back(var);
  }
  return est;
}

void write_pilot_csv(const std::filesystem::path& path, const PilotEstimate& est) {
  std::ostringstream out;
  out << "coord,variance\n";
  for (std::size_t m = 0; m < est.variances.size(); ++m) {
    out << m << ',' << io::format_double(est.variances[m]) << '\n';
  }
  io::write_text(path, out.str());
}

std::vector<double> read_pilot_csv(const std::filesystem::path& path) {
  std::vector<double> v;
  for (const auto& row : io::read_csv(path, "coord,variance")) {
    if (row.size() != 2 || io::parse_int(row[0]) != static_cast<long long>(v.size())) {
      throw std::runtime_error(path.string() + ": malformed pilot row");
    }
    v.push_back(io::parse_double(row[1]));
  }
  return v;
}

}  // namespace mwg
