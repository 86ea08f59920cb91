#include "mwg/quadrature.hpp"

#include <cmath>
#include <queue>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mwg/errors.hpp"

namespace mwg {
namespace {

// Simpson panel on [a, b] refined once: `value` is the Richardson-corrected
// two-half estimate and `error` its a-posteriori error estimate.
struct Panel {
  double a, b, fa, fm, fb, flm, frm;
  double value = 0.0;
  double error = 0.0;
  double magnitude = 0.0;

  void estimate() {
    double h = b - a;
    double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    double halves = h / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
    double diff = halves - whole;
    value = halves + diff / 15.0;
    error = std::abs(diff) / 15.0;
    magnitude = h / 12.0 * (std::abs(fa) + 4.0 * std::abs(flm) + 2.0 * std::abs(fm) +
                            4.0 * std::abs(frm) + std::abs(fb));
  }
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Smallest t > 0 with u(mode + dir * t) - u_min >= level.
double level_distance(const Potential1D& pot, double mode, double u_min, double dir,
                      double level) {
  double hi = 1e-3;
  while (pot.u(mode + dir * hi) - u_min < level) {
    hi *= 2.0;
    if (hi > 1e7) throw std::domain_error("potential does not grow: exp(-u) not integrable");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (pot.u(mode + dir * mid) - u_min < level) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int initial_panels, int max_depth) {
  if (!(b > a)) throw std::domain_error("adaptive_simpson: empty interval");
  if (initial_panels < 1) throw std::domain_error("adaptive_simpson: need at least one panel");
  // Globally adaptive: always bisect the panel with the largest error estimate.
  const long max_evaluations = 4L * initial_panels << std::min(max_depth, 20);
  long evaluations = 0;
  auto make = [&](double pa, double pb, double fa, double fm, double fb) {
    Panel p{pa, pb, fa, fm, fb, f(0.75 * pa + 0.25 * pb), f(0.25 * pa + 0.75 * pb)};
    evaluations += 2;
    p.estimate();
    return p;
  };

  std::priority_queue<Panel> heap;
  double total = 0.0, error = 0.0, magnitude = 0.0;
  const double h = (b - a) / initial_panels;
  double fa = f(a);
  ++evaluations;
  for (int i = 0; i < initial_panels; ++i) {
    double pa = a + i * h;
    double pb = (i + 1 == initial_panels) ? b : a + (i + 1) * h;
    double fm = f(0.5 * (pa + pb)), fb = f(pb);
    evaluations += 2;
    heap.push(make(pa, pb, fa, fm, fb));
    fa = fb;
  }
  auto refresh = [&] {
    // Re-sum from scratch to avoid drift from incremental updates.
    auto copy = heap;
    total = error = magnitude = 0.0;
    while (!copy.empty()) {
      total += copy.top().value;
      error += copy.top().error;
      magnitude += copy.top().magnitude;
      copy.pop();
    }
  };
  refresh();
  const double eps = std::numeric_limits<double>::epsilon();
  long since_refresh = 0;
  while (error > std::max(abs_tol, 64.0 * eps * magnitude)) {
    Panel top = heap.top();
    double mid = 0.5 * (top.a + top.b);
    if (evaluations >= max_evaluations || !(mid > top.a && mid < top.b)) {
      std::ostringstream msg;
      msg << "adaptive_simpson did not converge on [" << a << ", " << b << "]: worst panel ["
          << top.a << ", " << top.b << "] error " << top.error << ", total error " << error
          << " > tolerance " << abs_tol << ", value " << total << ", evaluations " << evaluations;
      throw NumericError(msg.str());
    }
    heap.pop();
    Panel left = make(top.a, mid, top.fa, top.flm, top.fm);
    Panel right = make(mid, top.b, top.fm, top.frm, top.fb);
    total += left.value + right.value - top.value;
    error += left.error + right.error - top.error;
    magnitude += left.magnitude + right.magnitude - top.magnitude;
    heap.push(left);
    heap.push(right);
    if (++since_refresh == 256) {
      refresh();
      since_refresh = 0;
    }
  }
  refresh();
  if (!std::isfinite(total)) throw NumericError("adaptive_simpson: non-finite integral");
  return {total, error, evaluations};
}

double find_minimizer(const Potential1D& pot) {
  constexpr double kLimit = 1e6;
  double x0 = pot.mode_hint.value_or(0.0);
  double d0 = pot.du(x0);
  if (d0 == 0.0) return x0;
  // Walk in the descent direction until du changes sign.
  double dir = d0 > 0 ? -1.0 : 1.0;
  double step = 1.0;
  double near = x0, far = x0 + dir * step;
  while ((pot.du(far) > 0) == (d0 > 0) && pot.du(far) != 0.0) {
    near = far;
    step *= 2.0;
    far = x0 + dir * step;
    if (std::abs(far) > kLimit) {
      throw std::domain_error("find_minimizer: minimizer not bracketed in [-1e6, 1e6]");
    }
  }
  double lo = std::min(near, far), hi = std::max(near, far);
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double g = pot.du(mid);
    if (g == 0.0) return mid;
    if (g < 0) lo = mid; else hi = mid;
  }
  return std::abs(pot.du(lo)) < std::abs(pot.du(hi)) ? lo : hi;
}

Support support_1d(const Potential1D& pot, double tail_tol) {
  Support s;
  s.mode = find_minimizer(pot);
  s.u_min = pot.u(s.mode);
  double wl = level_distance(pot, s.mode, s.u_min, -1.0, 1.0);
  double wr = level_distance(pot, s.mode, s.u_min, +1.0, 1.0);
  // exp(-(u - u*)) >= 1/e on the unit level set, so Z >= (wl + wr) / e.
  double mass_lb = (wl + wr) * std::exp(-1.0);
  double radius = 8.0 * std::max(wl, wr);
  auto tail = [&](double b) {
    double g = std::abs(pot.du(b));
    double excess = pot.u(b) - s.u_min;
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(-excess) / g;
  };
  for (int it = 0; it < 200; ++it) {
    if (tail(s.mode - radius) + tail(s.mode + radius) < tail_tol * mass_lb) break;
    radius *= 1.5;
  }
  s.lo = s.mode - radius;
  s.hi = s.mode + radius;
  return s;
}

Moments moments_1d(const Potential1D& pot, double rel_tol) {
  Moments m;
  m.support = support_1d(pot);
  const auto& sp = m.support;
  double width = sp.hi - sp.lo;
  auto w = [&](double x) { return std::exp(-(pot.u(x) - sp.u_min)); };
  // The mass is at least 1/e times the unit level-set width (>= width/8 / e)
  double scale_guess = width / 16.0;
  m.mass = adaptive_simpson(w, sp.lo, sp.hi, rel_tol * scale_guess * std::exp(-1.0)).value;
  double first = adaptive_simpson([&](double x) { return (x - sp.mode) * w(x); }, sp.lo, sp.hi,
                                  rel_tol * m.mass * scale_guess)
                     .value;
  m.mean = sp.mode + first / m.mass;
  double second = adaptive_simpson(
                      [&](double x) {
                        double d = x - m.mean;
                        return d * d * w(x);
                      },
                      sp.lo, sp.hi, rel_tol * 0.1 * m.mass * scale_guess * scale_guess)
                      .value;
  m.variance = second / m.mass;
  if (!(m.variance > 0) || !std::isfinite(m.variance)) {
    throw NumericError("moments_1d: non-positive or non-finite variance for '" + pot.name + "'");
  }
  return m;
}

double var_1d(const Potential1D& pot) { return moments_1d(pot).variance; }

}  // namespace mwg
