#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensm/extended_value.hpp"
#include "ensm/stream_stats.hpp"

namespace ensm {

// Conjugate posterior N(mean, variance) of the mean under prior N(eta, 1/c^2).
struct PosteriorParams {
  double mean = 0.0;
  double variance = 0.0;
};

PosteriorParams posterior_params(const StreamStats& stats, double eta, double c);

// Reciprocal of the shifted Gaussian mixture: the null-to-alternative
// density ratio of posterior against prior at mu0.
ExtendedValue bayes_factor(const StreamStats& stats, double eta, double c,
                           double mu0);

struct DegeneracyRow {
  double c = 0.0;
  PosteriorParams posterior;
  double log_bayes_factor = 0.0;
  double classical_cs_radius = 0.0;  // Ville at level 1/alpha, diverges
  double xb_cs_radius = 0.0;         // extended Ville from m = 1, converges
};

struct DegeneracyScanConfig {
  double eta = 0.0;
  double mu0 = 0.0;
  double alpha = 0.05;
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
};

// For each prior precision in c_grid (positive, decreasing): the posterior,
// the Bayes factor, the classical-Ville CS radius, and the CS radius from
// the crossing bound of the c-scaled mixture at m = 1, the latter estimated
// by Monte Carlo truncated means and solved by bisection on the level.
std::vector<DegeneracyRow> degeneracy_scan(const StreamStats& stats,
                                           std::span<const double> c_grid,
                                           const DegeneracyScanConfig& config);

}  // namespace ensm
