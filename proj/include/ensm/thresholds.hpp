#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ensm/extended_value.hpp"

namespace ensm {

enum class AlphaKind { kA, kB, kC };

struct AlphaSolution {
  double alpha = 0.0;
  double constant = 0.0;  // strictly inside (0, 1)
  AlphaKind kind = AlphaKind::kA;
  double residual = 0.0;
  std::string equation_id;  // frozen across refactors
};

// Crossing-probability bound C^{-1} E[M wedge C] together with its
// tail + truncated-mean decomposition.
struct XbBound {
  double level = 0.0;  // C (as a multiple of the thickness where relevant)
  double bound = 0.0;
  double tail_prob = 0.0;
  double truncated_mean_over_level = 0.0;
};

// Classical Ville level E[M_0]/alpha.
double classical_ville_level(double alpha, double initial_mean);

// Crossing bound for the flat Gaussian mixture at m = 1, as a function of
// the ratio x/D: erfc(sqrt(log(x/D))) + (2D/x) sqrt(log(x/D)/pi).
XbBound xb_flat_gaussian(double x_over_thickness);

// f(a) = 1 - erf(sqrt(log(1/a))) + 2a sqrt(log(1/a)/pi) = alpha.
AlphaSolution solve_a_alpha(double alpha);

// g(b) = 3b + 2b log(1/b) = alpha.
AlphaSolution solve_b_alpha(double alpha);

// h(c) = 3c + 2c log(2/(1.79 c)) = alpha, with c < 1/2.
AlphaSolution solve_c_alpha(double alpha);

// The target equations themselves, exposed for monotonicity checks.
double a_alpha_equation(double a);
double b_alpha_equation(double b);
double c_alpha_equation(double c);

// Prior precision minimizing the Gaussian-mixture CS radius at time n:
// c^2 = n / (-W_{-1}(-alpha^2/e) - 1).
double optimal_c_squared(std::int64_t n, double alpha);

// Plug-in estimate bound = mean(min(M_i, C)) / C; infinite entries
// contribute C.
XbBound xb_empirical(std::span<const ExtendedValue> sample_of_m, double level);

}  // namespace ensm
