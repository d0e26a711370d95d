#include "ensm/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ensm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// 10 * (bits of a double mantissa), the stated non-convergence cap.
constexpr std::int64_t kMaxBisectIterations = 10 * 53;

}  // namespace

RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, lo, hi};
  if (fhi == 0.0) return {hi, 0.0, 0, lo, hi};
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: f(lo) and f(hi) have the same sign");

  RootResult out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  double a = lo, b = hi, fa = flo;
  for (;;) {
    double mid = a + 0.5 * (b - a);
    double fm = f(mid);
    ++out.iterations;
    if (std::abs(fm) <= tol) {
      out.root = mid;
      out.residual = std::abs(fm);
      return out;
    }
    if (out.iterations >= kMaxBisectIterations || mid == a || mid == b)
      throw std::runtime_error("bisect: no convergence within iteration cap");
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
}

// The platform erf/erfc are correctly rounded to well under the 1e-14
// contract; the test suite checks them against an in-repo series oracle.
double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

double lambert_w_minus1(double y) {
  const double minus_inv_e = -std::exp(-1.0);
  if (!(y >= minus_inv_e) || !(y < 0.0))
    throw std::domain_error("lambert_w_minus1: y outside [-1/e, 0)");
  if (y == minus_inv_e) return -1.0;

  // Solve g(x) = x + log(-x) - log(-y) = 0; g is increasing on (-inf, -1]
  // and avoids the underflow of x e^x for very negative x.
  const double log_neg_y = std::log(-y);
  auto g = [&](double x) { return x + std::log(-x) - log_neg_y; };

  double lo = -2.0;
  while (g(lo) > 0.0) lo *= 2.0;
  return bisect(g, lo, -1.0, 1e-14).root;
}

double log_v_function(double x) {
  const double half_x_sq = 0.5 * x * x;
  if (x >= -1.0) {
    return half_x_sq + std::log1p(std::erf(x / std::numbers::sqrt2));
  }
  const double z = -x / std::numbers::sqrt2;  // z > 0.7
  if (z < 18.0) {
    return half_x_sq + std::log(std::erfc(z));
  }
  // erfc(z) ~ e^{-z^2}/(z sqrt(pi)) * (1 - 1/(2z^2) + 3/(4z^4) - ...);
  // the z^2 cancels against x^2/2 exactly.
  const double zi2 = 1.0 / (z * z);
  const double series =
      std::log1p(zi2 * (-0.5 + zi2 * (0.75 + zi2 * (-1.875 + zi2 * 6.5625))));
  return -std::log(z) - 0.5 * std::log(std::numbers::pi) + series;
}

ExtendedValue v_function(double x) {
  return ExtendedValue::from_log(log_v_function(x));
}

double v_inverse(ExtendedValue y) {
  const double target = y.log_value();
  constexpr double kLeftEnd = -40.0;
  if (!(target >= log_v_function(kLeftEnd)))
    throw std::domain_error("v_inverse: y below V at the left bracket end");

  double lo = kLeftEnd;
  double hi = 1.0;
  while (log_v_function(hi) < target) hi *= 2.0;
  auto f = [&](double x) { return log_v_function(x) - target; };
  return bisect(f, lo, hi, 1e-11).root;
}

}  // namespace ensm
