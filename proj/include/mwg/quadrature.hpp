#pragma once

#include <functional>

#include "mwg/potential.hpp"

namespace mwg {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Adaptive Simpson quadrature with interval bisection. The range is first cut
/// into `initial_panels` equal panels so narrow peaks are not skipped, then the
/// panel with the largest error estimate is bisected until the summed estimate
/// is below `abs_tol` (or at rounding level). Throws NumericError once the
/// evaluation budget, 4 * initial_panels * 2^min(max_depth, 20), runs out.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int initial_panels = 64, int max_depth = 40);

/// Minimizer of a strictly convex potential by bisection on du. The bracket is
/// grown geometrically from the mode hint (or 0); throws std::domain_error if
/// no sign change of du is found inside [-1e6, 1e6].
double find_minimizer(const Potential1D& pot);

/// Truncation window [mode - R, mode + R] for exp(-u), with R grown until the
/// log-concave tail bound exp(-(u(b) - u*)) / |u'(b)| on both sides is below
/// `tail_tol` times a lower bound on the normalizing constant.
struct Support {
  double mode = 0.0;
  double u_min = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
Support support_1d(const Potential1D& pot, double tail_tol = 1e-12);

/// Normalizing mass (of exp(-(u - u_min))), mean and variance of exp(-u)/Z.
struct Moments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  Support support;
};
Moments moments_1d(const Potential1D& pot, double rel_tol = 1e-10);

/// Variance of the normalized density exp(-u)/Z.
double var_1d(const Potential1D& pot);

}  // namespace mwg
