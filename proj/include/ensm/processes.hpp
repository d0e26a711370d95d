#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ensm/extended_value.hpp"
#include "ensm/rng.hpp"
#include "ensm/stream_stats.hpp"

namespace ensm {

// Likelihood ratio of N(mu,1) against N(mu0,1) evaluated on (n, S_n);
// a martingale under N(mu0,1) and a supermartingale for 1-subGaussian data.
ExtendedValue lr_gaussian(const StreamStats& stats, double mu, double mu0);

// Mixture of lr_gaussian over mu ~ N(mu0, 1/c^2).
ExtendedValue gaussian_mixture(const StreamStats& stats, double c, double mu0);

// Mixture over the flat measure of density thickness/sqrt(2*pi) on R.
// Starts at infinity: the n = 0 value is the exact infinite sentinel.
ExtendedValue flat_mixture(const StreamStats& stats, double mu0,
                           double thickness = 1.0);

// Mixture over mu ~ N(eta, 1/c^2); equals gaussian_mixture when eta == mu0.
ExtendedValue shifted_gaussian_mixture(const StreamStats& stats, double c,
                                       double eta, double mu0);

// Flat mixture conditioned on nu hypothetical observations equal to mu0;
// identical to nu^{-1/2} * gaussian_mixture(stats, sqrt(nu), mu0).
ExtendedValue conditioned_process(const StreamStats& stats, std::int64_t nu,
                                  double mu0);

// Quotient of flat-mixture values at n + nu and at nu (the thickness cancels).
ExtendedValue division_process(const PrefixPair& prefix, double mu0);

// Half-line flat mixture Q_n = V(sqrt(n) (mean - mu0)) / sqrt(4n); an
// e-process for the running-average subGaussian class. Defined for n >= 1.
ExtendedValue half_flat_eprocess(const StreamStats& stats, double mu0);

enum class ProcessFamily {
  kLr,
  kGaussianMix,
  kFlatMix,
  kFlatMixThick,
  kShiftedMix,
  kConditioned,
  kDivision,
  kHalfFlat,
};

// Tagged description of one process; validate() enforces the parameters
// required by the chosen family.
struct ProcessSpec {
  ProcessFamily family = ProcessFamily::kFlatMix;
  double mu0 = 0.0;
  std::optional<double> mu;          // kLr
  std::optional<double> c;           // mixture precision, > 0
  std::optional<double> eta;         // kShiftedMix
  std::optional<std::int64_t> nu;    // kConditioned / kDivision, >= 1
  std::optional<double> thickness;   // kFlatMixThick, > 0

  void validate() const;

  // Whole-prefix evaluation. kDivision uses the first nu observations as
  // the burn-in segment and requires stats.n > nu.
  ExtendedValue evaluate(const StreamStats& stats) const;
  ExtendedValue evaluate(const PrefixPair& prefix) const;

  // First observation index at which the process is defined: 1 for
  // kHalfFlat, nu + 1 for kDivision, 0 otherwise.
  std::int64_t first_index() const;
};

enum class StartLaw {
  kCauchyAbs,             // M_0 = |standard Cauchy|
  kAtomHalfInf,           // M_0 = 1 or infinity with probability 1/2 each
  kConstInfThen,          // M_0 = infinity, M_n = |Cauchy| prod(1/2 + xi)
  kInfUntilFirstSuccess,  // infinite until the first xi = 1, then as above
};

struct SimPath {
  std::vector<ExtendedValue> values;  // indexed n = 0..horizon
  std::uint64_t seed = 0;
  double theta = 0.0;
};

// One path of M_n = M_{n-1} (1/2 + xi_n), xi_n ~ Bernoulli(theta), from the
// chosen initial law. Reproducible: the stream is derived from
// (seed, path_index) only.
SimPath simulate_multiplicative(double theta, StartLaw start,
                                std::int64_t horizon, std::uint64_t seed,
                                std::uint64_t path_index = 0);

// Streaming stepper for the same recursion; used by the Monte Carlo lab to
// avoid materializing whole paths.
class MultiplicativeSim {
public:
  MultiplicativeSim(double theta, StartLaw start, Rng rng);

  ExtendedValue current() const { return value_; }
  ExtendedValue step();  // advances one index and returns the new value

private:
  double theta_;
  StartLaw start_;
  Rng rng_;
  ExtendedValue value_;
  double log_finite_part_;  // running log of |Y| prod(1/2 + xi)
  bool any_success_ = false;
};

}  // namespace ensm
