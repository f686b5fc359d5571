#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "levyspec/errors.hpp"

namespace levyspec {

// Adaptive Simpson integration with Richardson error control. Throws
// NumericError with context when the recursion budget is exhausted before
// the tolerance is met.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double abs_tol = 1e-11, int max_depth = 48,
                                 const std::string& context = "") {
  struct Impl {
    const std::function<double(double)>& f;
    const std::string& context;
    double recurse(double a, double m, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-300) {
        return left + right + delta / 15.0;
      }
      if (depth <= 0) {
        throw NumericError("integrate_adaptive: recursion budget exhausted" +
                           (context.empty() ? std::string() : " (" + context + ")"));
      }
      return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (!(a < b)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  Impl impl{f, context};
  return impl.recurse(a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace levyspec
