#pragma once

#include <cmath>
#include <string>

#include "echarge/error.hpp"

namespace echarge {

struct BisectionResult {
  double root = 0.0;
  int iterations = 0;
};

/// Bisection on [a, b] until the half-width drops below abs_tol.
/// Throws NoRoot when f(a) and f(b) share a strict sign.
template <class F>
BisectionResult bisect(F&& f, double a, double b, double abs_tol = 1e-10,
                       int max_iterations = 200) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    invalid_input("bisect: bracket endpoints must be finite");
  }
  if (!(a < b)) invalid_input("bisect: bracket must satisfy a < b");

  double fa = f(a);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    numerical_failure("bisect: function is not finite at the bracket endpoints");
  }
  if (fa == 0.0) return {a, 0};
  if (fb == 0.0) return {b, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::NoRoot, "no sign change in [" + std::to_string(a) +
                                       ", " + std::to_string(b) + "]");
  }

  int it = 0;
  while (it < max_iterations && 0.5 * (b - a) > abs_tol) {
    ++it;
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, it};
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return {0.5 * (a + b), it};
}

}  // namespace echarge
