#include "mwg/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "mwg/model.hpp"

namespace mwg {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Potential1D Potential1D::shifted(double offset) const {
  Potential1D out;
  out.u = [f = u, offset](double x) { return f(x - offset); };
  out.du = [f = du, offset](double x) { return f(x - offset); };
  if (mode_hint) out.mode_hint = *mode_hint + offset;
  out.name = name + "+shift";
  return out;
}

bool du_non_decreasing(const Potential1D& pot, double lo, double hi, int points) {
  double prev = pot.du(lo);
  for (int i = 1; i < points; ++i) {
    double x = lo + (hi - lo) * i / (points - 1);
    double cur = pot.du(x);
    if (cur < prev) return false;
    prev = cur;
  }
  return true;
}

namespace potentials {

Potential1D gaussian(double mean, double variance) {
  if (!(variance > 0)) throw std::domain_error("gaussian: variance must be positive");
  Potential1D p;
  p.u = [=](double x) { return 0.5 * (x - mean) * (x - mean) / variance; };
  p.du = [=](double x) { return (x - mean) / variance; };
  p.mode_hint = mean;
  p.name = "gaussian";
  return p;
}

Potential1D quartic() {
  Potential1D p;
  p.u = [](double x) { double x2 = x * x; return x2 * x2; };
  p.du = [](double x) { return 4.0 * x * x * x; };
  p.mode_hint = 0.0;
  p.name = "quartic";
  return p;
}

Potential1D quadratic_quartic() {
  Potential1D p;
  p.u = [](double x) { double x2 = x * x; return 0.5 * x2 + 0.25 * x2 * x2; };
  p.du = [](double x) { return x + x * x * x; };
  p.mode_hint = 0.0;
  p.name = "quadratic_quartic";
  return p;
}

Potential1D exp_linear() {
  Potential1D p;
  p.u = [](double x) { return std::expm1(-x) + x; };
  p.du = [](double x) { return 1.0 - std::exp(-x); };
  p.mode_hint = 0.0;
  p.name = "exp_linear";
  return p;
}

Potential1D softplus_cubic() {
  // softplus^3 is convex: a convex increasing map (t^3 on t > 0) of a convex
  // positive function.
  Potential1D p;
  p.u = [](double x) { double s = softplus(x); return 0.5 * x * x + 0.3 * s * s * s; };
  p.du = [](double x) { double s = softplus(x); return x + 0.9 * s * s * sigmoid(x); };
  p.name = "softplus_cubic";
  return p;
}

std::vector<Potential1D> builtin_family() {
  std::vector<Potential1D> fam{gaussian(), quartic(), quadratic_quartic(), exp_linear(),
                               softplus_cubic()};
  for (int n : {4, 64}) {
    for (int y : {0, n / 2}) {
      auto p = logistic_cond_potential(y, n, 0.0);
      p.name = "logistic_n" + std::to_string(n) + "_y" + std::to_string(y);
      fam.push_back(std::move(p));
    }
  }
  return fam;
}

Potential1D by_name(const std::string& name) {
  for (auto& p : builtin_family()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown potential '" + name + "'");
}

}  // namespace potentials
}  // namespace mwg
