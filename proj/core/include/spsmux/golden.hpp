#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace spsmux {

struct GoldenResult {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Stops once the bracket is narrower than tol (in x) or after max_iter
/// shrink steps, and returns the best interior probe.
template <class F>
GoldenResult golden_section_maximize(F&& f, double a, double b,
                                     double tol = 1e-8, int max_iter = 200) {
  if (!(a <= b)) throw std::invalid_argument("need a <= b");
  constexpr double invphi = 0.6180339887498949;   // (sqrt(5)-1)/2
  constexpr double invphi2 = 0.3819660112501051;  // (3-sqrt(5))/2

  double h = b - a;
  double c = a + invphi2 * h;
  double d = a + invphi * h;
  double yc = f(c);
  double yd = f(d);
  for (int it = 0; it < max_iter && h > tol; ++it) {
    if (yc > yd) {
      b = d;
      d = c;
      yd = yc;
      h = b - a;
      c = a + invphi2 * h;
      yc = f(c);
    } else {
      a = c;
      c = d;
      yc = yd;
      h = b - a;
      d = a + invphi * h;
      yd = f(d);
    }
  }
  return yc > yd ? GoldenResult{c, yc} : GoldenResult{d, yd};
}

}  // namespace spsmux
