#pragma once

#include <cmath>
#include <utility>

namespace hbpl::detail {

struct ScalarMinimum {
  double argmin;
  double value;
  int iterations;
  bool converged;
};

/// Golden-section search for a unimodal f on [lo, hi]; stops once the bracket
/// is narrower than `width_tol`.
template <typename F>
ScalarMinimum golden_section(F&& f, double lo, double hi, double width_tol, int max_iter = 400) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (std::abs(b - a) > width_tol && it < max_iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  // Return the best of the probed interior points and the bracket ends.
  double best_x = fc <= fd ? c : d;
  double best_f = fc <= fd ? fc : fd;
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f, it, std::abs(b - a) <= width_tol};
}

}  // namespace hbpl::detail
