#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensm/cs_builder.hpp"
#include "ensm/processes.hpp"
#include "ensm/rng.hpp"
#include "ensm/stream_stats.hpp"

namespace ensm {

// 1-subGaussian observation models. A per-index mean function turns any of
// them into an independent non-identically-distributed sequence.
struct DataModel {
  enum class Noise { kGaussian, kRademacher, kUniformPm1 };

  Noise noise = Noise::kGaussian;
  double mu = 0.0;
  std::function<double(std::int64_t)> mean_fn;  // 1-based index when set

  static DataModel gaussian(double mu) { return {Noise::kGaussian, mu, {}}; }
  static DataModel rademacher(double mu) {
    return {Noise::kRademacher, mu, {}};
  }
  static DataModel uniform_pm1_shift(double mu) {
    return {Noise::kUniformPm1, mu, {}};
  }
  static DataModel independent_sequence(
      Noise noise, std::function<double(std::int64_t)> means) {
    return {noise, 0.0, std::move(means)};
  }

  double mean_at(std::int64_t index) const {
    return mean_fn ? mean_fn(index) : mu;
  }

  double sample(std::int64_t index, Rng& rng) const;
};

struct SimReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t reps = 0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::optional<double> theoretical_bound;
  bool pass = false;

  // Schema: fields above with snake_case keys; verdict as "pass"/"fail".
  std::string to_json() const;
};

// Rule evaluated along a path; the index of first satisfaction (or the
// horizon, whichever comes first) is the stopping time.
struct StopRule {
  enum class Kind { kFixedTime, kHitAtMost, kHitAtLeast };
  Kind kind = Kind::kFixedTime;
  double param = 0.0;

  static StopRule fixed_time(std::int64_t n) {
    return {Kind::kFixedTime, static_cast<double>(n)};
  }
  static StopRule hit_at_most(double x) { return {Kind::kHitAtMost, x}; }
  static StopRule hit_at_least(double x) { return {Kind::kHitAtLeast, x}; }
};

struct McConfig {
  std::int64_t horizon = 10'000;
  std::int64_t reps = 10'000;
  std::uint64_t seed = 1;
};

// Fraction of paths with sup_{m <= n <= horizon} M_n >= threshold. The
// start m defaults to the process's first defined index; passing m = 1 for
// a flat mixture gives the meaningful bound (from m = 0 the infinite start
// makes both sides trivially one). Pass iff the estimate is at most
// bound + 3 standard errors.
SimReport estimate_crossing(const ProcessSpec& spec, const DataModel& data,
                            double threshold, double bound,
                            const McConfig& config,
                            std::int64_t from_index = -1);

// Same event for the multiplicative example simulator, from index 0.
SimReport estimate_crossing(double theta, StartLaw start, double threshold,
                            double bound, const McConfig& config);

// Fraction of replications whose running CS contains mu0 at every step.
// Pass iff coverage >= 1 - alpha - 3 standard errors.
SimReport estimate_coverage(const CsFamily& family, const DataModel& data,
                            double mu0, const McConfig& config);

// For each cap k, checks that n -> mean(M_n wedge k) is nonincreasing over
// the time grid within 3 standard errors of each paired difference. The
// estimate reported is the largest violation z-score.
SimReport check_truncated_supermartingale(const ProcessSpec& spec,
                                          const DataModel& data,
                                          std::span<const double> k_grid,
                                          std::span<const std::int64_t> n_grid,
                                          const McConfig& config);

// Monte Carlo mean of M at a stopping time (pi satisfied or horizon).
SimReport estimate_stopped_mean(double theta, StartLaw start, StopRule pi,
                                double bound, const McConfig& config);

// Estimate of Pr[M_{tau v pi} >= threshold] against the Markov bound
// mean(M_pi)/threshold estimated on the same paths.
SimReport check_stopped_ville(double theta, StartLaw start, StopRule pi,
                              StopRule tau, double threshold,
                              const McConfig& config);

struct RandomizedVilleResult {
  SimReport randomized;   // Pr[sup_{n<=tau} M >= C or M_tau >= U C] vs bound
  double plain_estimate;  // frequency without the randomized boost
};

RandomizedVilleResult check_randomized_ville(
    double theta, StartLaw start, double threshold, StopRule tau, double bound,
    const McConfig& config, std::optional<double> u_override = std::nullopt);

RandomizedVilleResult check_randomized_ville(
    const ProcessSpec& spec, const DataModel& data, double threshold,
    StopRule tau, double bound, const McConfig& config,
    std::optional<double> u_override = std::nullopt,
    std::int64_t from_index = -1);

// Median path value at each checkpoint (log domain), reduced to the ratio
// median(last)/median(first). `expect_growth` selects the verdict direction:
// growth requires ratio >= required_ratio, decay requires <= 1/required_ratio.
struct TrendResult {
  std::vector<double> checkpoint_log_medians;
  SimReport report;  // estimate = log10 of the achieved median ratio
};

TrendResult convergence_trend(const ProcessSpec& spec, const DataModel& data,
                              std::span<const std::int64_t> checkpoints,
                              bool expect_growth, double required_ratio,
                              const McConfig& config);

// The two-step construction showing the likelihood ratio fails the
// supermartingale property over the running-average class: independent
// Rademacher observations with means mu0 - delta then mu0 + delta, where
// delta makes the one-step conditional mean of the ratio exceed one by the
// chosen margin. `growth` passes when the paired increase exceeds 3 standard
// errors; `q_crossing` checks the half-flat e-process stays below alpha on
// the alternating extension of the same stream.
struct EprocessControlResult {
  double delta = 0.0;
  double one_step_mean = 0.0;  // closed form, must exceed 1
  SimReport growth;
  SimReport q_crossing;
};

EprocessControlResult check_eprocess_not_supermartingale(
    double gamma, double margin, double alpha, const McConfig& config);

}  // namespace ensm
