#pragma once

#include <string>
#include <vector>

namespace mwg::verify {

/// One row of the theory report. `pass` means the inequality named by `check`
/// holds between `value` and `bound`; `c` is empty for c-independent checks.
struct CheckRow {
  std::string check;
  std::string potential;
  std::string c;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SuiteOptions {
  std::vector<double> cs{0.25, 1.0, 4.0};
  std::size_t grid = 401;         // 1D kernels for the conductance check
  std::size_t cheeger_grid = 16;  // exhaustive conductance
  std::size_t grid_2d = 161;      // per axis
  double gaussian_gap_rel_tol = 0.05;
  double decomposition_tol = 1e-3;
};

/// Runs every numerical check of the one-dimensional bounds on the built-in
/// potential family and the bivariate Gaussian Gibbs/MwG comparisons.
std::vector<CheckRow> run_theory_suite(const SuiteOptions& opts);

/// CSV `check,potential,c,value,bound,pass`.
std::string format_report(const std::vector<CheckRow>& rows);

}  // namespace mwg::verify
