#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mwg {

/// log(1 + e^x) without overflow: max(x, 0) + log1p(e^{-|x|}).
double softplus(double x);
/// e^x / (1 + e^x), evaluated on the non-overflowing branch.
double sigmoid(double x);

/// One-dimensional potential u with density proportional to exp(-u).
/// Convex and C^1; `du` is its derivative.
struct Potential1D {
  std::function<double(double)> u;
  std::function<double(double)> du;
  std::optional<double> mode_hint;
  std::string name;

  double operator()(double x) const { return u(x); }

  /// Same potential translated so that the new density is pi(x - offset).
  Potential1D shifted(double offset) const;
};

/// True when du is non-decreasing on `points` equally spaced nodes of [lo, hi].
bool du_non_decreasing(const Potential1D& pot, double lo, double hi, int points = 1001);

namespace potentials {

Potential1D gaussian(double mean = 0.0, double variance = 1.0);
Potential1D quartic();                // x^4
Potential1D quadratic_quartic();      // x^2/2 + x^4/4
Potential1D exp_linear();             // e^{-x} + x - 1
Potential1D softplus_cubic();         // x^2/2 + 0.3 softplus(x)^3

/// The fixed test family: every potential above plus logistic conditionals
/// with n in {4, 64} and y in {0, n/2} (mu = 0).
std::vector<Potential1D> builtin_family();

/// Looks up a member of builtin_family() by name; throws std::invalid_argument.
Potential1D by_name(const std::string& name);

}  // namespace potentials
}  // namespace mwg
