#pragma once

#include <cmath>
#include <concepts>

namespace effsize {

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Stops once the bracket is narrower than tol; returns the better of the
/// two interior probes.
template <std::invocable<double> F>
ScalarMaximum golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-12,
                                      int max_iterations = 1000) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (hi - lo > tol && it < max_iterations) {
    ++it;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarMaximum{c, fc, it} : ScalarMaximum{d, fd, it};
}

}  // namespace effsize
