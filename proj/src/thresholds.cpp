#include "ensm/thresholds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ensm/numerics.hpp"

namespace ensm {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("alpha must lie in (0, 1)");
}

AlphaSolution solve_on_bracket(double alpha, AlphaKind kind,
                               double (*equation)(double), double lo, double hi,
                               const char* equation_id) {
  require_alpha(alpha);
  auto f = [&](double x) { return equation(x) - alpha; };
  RootResult r = bisect(f, lo, hi, 1e-12);
  AlphaSolution out;
  out.alpha = alpha;
  out.constant = r.root;
  out.kind = kind;
  out.residual = r.residual;
  out.equation_id = equation_id;
  return out;
}

}  // namespace

double classical_ville_level(double alpha, double initial_mean) {
  require_alpha(alpha);
  if (!(initial_mean > 0.0))
    throw std::domain_error("classical_ville_level: initial_mean must be > 0");
  return initial_mean / alpha;
}

XbBound xb_flat_gaussian(double x_over_thickness) {
  if (!(x_over_thickness > 1.0))
    throw std::domain_error("xb_flat_gaussian: requires x/D > 1");
  const double log_ratio = std::log(x_over_thickness);
  XbBound out;
  out.level = x_over_thickness;
  out.tail_prob = erfc(std::sqrt(log_ratio));
  out.truncated_mean_over_level =
      2.0 * std::sqrt(log_ratio / std::numbers::pi) / x_over_thickness;
  out.bound = out.tail_prob + out.truncated_mean_over_level;
  return out;
}

double a_alpha_equation(double a) {
  const double g = std::log(1.0 / a);
  return erfc(std::sqrt(g)) + 2.0 * a * std::sqrt(g / std::numbers::pi);
}

double b_alpha_equation(double b) { return 3.0 * b + 2.0 * b * std::log(1.0 / b); }

double c_alpha_equation(double c) {
  return 3.0 * c + 2.0 * c * std::log(2.0 / (1.79 * c));
}

AlphaSolution solve_a_alpha(double alpha) {
  return solve_on_bracket(alpha, AlphaKind::kA, a_alpha_equation, 1e-12,
                          1.0 - 1e-12, "f_gaussian_flat");
}

AlphaSolution solve_b_alpha(double alpha) {
  return solve_on_bracket(alpha, AlphaKind::kB, b_alpha_equation, 1e-12,
                          1.0 - 1e-12, "g_subgaussian_flat");
}

AlphaSolution solve_c_alpha(double alpha) {
  return solve_on_bracket(alpha, AlphaKind::kC, c_alpha_equation, 1e-12,
                          0.5 - 1e-12, "h_one_sided");
}

double optimal_c_squared(std::int64_t n, double alpha) {
  require_alpha(alpha);
  if (n < 1) throw std::domain_error("optimal_c_squared: n must be >= 1");
  const double w = lambert_w_minus1(-alpha * alpha / std::numbers::e);
  return static_cast<double>(n) / (-w - 1.0);
}

XbBound xb_empirical(std::span<const ExtendedValue> sample_of_m, double level) {
  if (sample_of_m.empty())
    throw std::invalid_argument("xb_empirical: empty sample");
  if (!(level > 0.0))
    throw std::domain_error("xb_empirical: level must be > 0");
  double tail = 0.0;
  double truncated_sum = 0.0;
  for (const ExtendedValue& m : sample_of_m) {
    const double capped = m.truncated(level);
    if (capped == level) {
      tail += 1.0;
    } else {
      truncated_sum += capped;
    }
  }
  const double count = static_cast<double>(sample_of_m.size());
  XbBound out;
  out.level = level;
  out.tail_prob = tail / count;
  out.truncated_mean_over_level = truncated_sum / count / level;
  out.bound = out.tail_prob + out.truncated_mean_over_level;
  return out;
}

}  // namespace ensm
