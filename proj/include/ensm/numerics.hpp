#pragma once

#include <cstdint>
#include <functional>

#include "ensm/extended_value.hpp"

namespace ensm {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  std::int64_t iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Deterministic bisection for a monotone f with a sign change on [lo, hi].
// Stops once |f(mid)| <= tol; throws std::invalid_argument when f(lo) and
// f(hi) share a sign, std::runtime_error after 10 * 53 iterations.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-12);

double erf(double x);
double erfc(double x);

// W_{-1} branch of the Lambert W function: the solution x <= -1 of
// x e^x = y, defined for y in [-1/e, 0).
double lambert_w_minus1(double y);

// log of V(x) = e^{x^2/2} (1 + erf(x/sqrt 2)), stable over the whole line.
double log_v_function(double x);

ExtendedValue v_function(double x);

// Inverse of V on its increasing branch, solved in log domain.
// Throws std::domain_error when y < V(-40) (below the supported bracket).
double v_inverse(ExtendedValue y);

}  // namespace ensm
