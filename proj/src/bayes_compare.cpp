#include "ensm/bayes_compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ensm/cs_builder.hpp"
#include "ensm/numerics.hpp"
#include "ensm/processes.hpp"
#include "ensm/rng.hpp"

namespace ensm {

PosteriorParams posterior_params(const StreamStats& stats, double eta,
                                 double c) {
  if (!(c > 0.0)) throw std::invalid_argument("posterior_params: c must be > 0");
  const double c2 = c * c;
  const double n = static_cast<double>(stats.n);
  return {(c2 * eta + stats.sum) / (c2 + n), 1.0 / (c2 + n)};
}

ExtendedValue bayes_factor(const StreamStats& stats, double eta, double c,
                           double mu0) {
  return shifted_gaussian_mixture(stats, c, eta, mu0).reciprocal();
}

namespace {

// Level C at which the empirical crossing bound mean(min(M_i, C))/C equals
// alpha. The sample is passed as sorted values with prefix sums.
double solve_empirical_level(const std::vector<double>& sorted,
                             const std::vector<double>& prefix_sum,
                             double alpha) {
  const double count = static_cast<double>(sorted.size());
  auto xb = [&](double level) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), level);
    const std::size_t below = static_cast<std::size_t>(it - sorted.begin());
    const double above = count - static_cast<double>(below);
    return (prefix_sum[below] / level + above) / count;
  };
  double lo = sorted.front();          // xb(min) = 1 > alpha
  double hi = std::max(lo * 2.0, 1.0);
  while (xb(hi) > alpha) hi *= 2.0;
  return bisect([&](double level) { return xb(level) - alpha; }, lo, hi, 1e-10)
      .root;
}

}  // namespace

std::vector<DegeneracyRow> degeneracy_scan(const StreamStats& stats,
                                           std::span<const double> c_grid,
                                           const DegeneracyScanConfig& config) {
  for (std::size_t i = 0; i + 1 < c_grid.size(); ++i)
    if (!(c_grid[i] > c_grid[i + 1]))
      throw std::invalid_argument("degeneracy_scan: c_grid must be decreasing");
  if (!c_grid.empty() && !(c_grid.back() > 0.0))
    throw std::invalid_argument("degeneracy_scan: c_grid must be positive");

  const double n = static_cast<double>(stats.n);
  std::vector<DegeneracyRow> rows;
  rows.reserve(c_grid.size());
  for (std::size_t idx = 0; idx < c_grid.size(); ++idx) {
    const double c = c_grid[idx];
    const double c2 = c * c;
    DegeneracyRow row;
    row.c = c;
    row.posterior = posterior_params(stats, config.eta, c);
    row.log_bayes_factor =
        bayes_factor(stats, config.eta, c, config.mu0).log_value();
    row.classical_cs_radius =
        0.5 * (cs_shifted(stats, c, config.eta, config.alpha).upper -
               cs_shifted(stats, c, config.eta, config.alpha).lower);

    // M_1 of the c-scaled mixture under the null: its distribution does not
    // depend on mu0, so one sample gives the level for every candidate null.
    Rng rng = Rng::for_path(config.seed, idx);
    std::vector<double> sample(static_cast<std::size_t>(config.mc_samples));
    for (double& m : sample) {
      const double z = rng.normal();
      m = std::exp(z * z / (2.0 * (c2 + 1.0)) - 0.5 * std::log(c2 + 1.0));
    }
    std::sort(sample.begin(), sample.end());
    std::vector<double> prefix_sum(sample.size() + 1, 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i)
      prefix_sum[i + 1] = prefix_sum[i] + sample[i];
    const double level = solve_empirical_level(sample, prefix_sum, config.alpha);

    const double bracket = (c2 + n) * (2.0 * std::log(level) + std::log(c2 + n));
    row.xb_cs_radius = bracket >= 0.0 ? std::sqrt(bracket) / n : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ensm
