#include "ensm/processes.hpp"

#include <cmath>
#include <stdexcept>

#include "ensm/numerics.hpp"

namespace ensm {

namespace {

double require_positive(std::optional<double> v, const char* what) {
  if (!v || !(*v > 0.0)) throw std::invalid_argument(what);
  return *v;
}

std::int64_t require_count(std::optional<std::int64_t> v, const char* what) {
  if (!v || *v < 1) throw std::invalid_argument(what);
  return *v;
}

}  // namespace

ExtendedValue lr_gaussian(const StreamStats& stats, double mu, double mu0) {
  const double n = static_cast<double>(stats.n);
  const double log_value =
      (mu - mu0) * stats.sum - 0.5 * n * (mu * mu - mu0 * mu0);
  return ExtendedValue::from_log(log_value);
}

ExtendedValue gaussian_mixture(const StreamStats& stats, double c, double mu0) {
  if (!(c > 0.0)) throw std::invalid_argument("gaussian_mixture: c must be > 0");
  const double n = static_cast<double>(stats.n);
  const double centered = n * mu0 - stats.sum;  // n (mu0 - mean)
  const double log_value = 0.5 * (std::log(c * c) - std::log(c * c + n)) +
                           centered * centered / (2.0 * (c * c + n));
  return ExtendedValue::from_log(log_value);
}

ExtendedValue flat_mixture(const StreamStats& stats, double mu0,
                           double thickness) {
  if (!(thickness > 0.0))
    throw std::invalid_argument("flat_mixture: thickness must be > 0");
  if (stats.n == 0) return ExtendedValue::infinity();
  const double n = static_cast<double>(stats.n);
  const double centered = n * mu0 - stats.sum;
  const double log_value =
      std::log(thickness) - 0.5 * std::log(n) + centered * centered / (2.0 * n);
  return ExtendedValue::from_log(log_value);
}

ExtendedValue shifted_gaussian_mixture(const StreamStats& stats, double c,
                                       double eta, double mu0) {
  if (!(c > 0.0))
    throw std::invalid_argument("shifted_gaussian_mixture: c must be > 0");
  const double n = static_cast<double>(stats.n);
  const double c2 = c * c;
  const double post_mean = (c2 * eta + stats.sum) / (c2 + n);
  const double log_value =
      0.5 * (std::log(c2) - std::log(c2 + n)) +
      0.5 * ((c2 + n) * (mu0 - post_mean) * (mu0 - post_mean) -
             c2 * (mu0 - eta) * (mu0 - eta));
  return ExtendedValue::from_log(log_value);
}

ExtendedValue conditioned_process(const StreamStats& stats, std::int64_t nu,
                                  double mu0) {
  if (nu < 1) throw std::invalid_argument("conditioned_process: nu must be >= 1");
  const double n = static_cast<double>(stats.n);
  const double total = n + static_cast<double>(nu);
  const double centered = n * mu0 - stats.sum;
  const double log_value =
      -0.5 * std::log(total) + centered * centered / (2.0 * total);
  return ExtendedValue::from_log(log_value);
}

ExtendedValue division_process(const PrefixPair& prefix, double mu0) {
  const std::int64_t nu = prefix.nu();
  const std::int64_t n = prefix.post_count();
  if (nu < 1 || n < 1)
    throw std::invalid_argument("division_process: requires nu >= 1 and n >= 1");
  const double nd = static_cast<double>(n);
  const double nud = static_cast<double>(nu);
  const double total = nd + nud;
  const double s_nu = prefix.at_nu.sum;
  const double s_total = prefix.at_total.sum;
  const double post = s_total - s_nu;
  const double centered = nd * mu0 - post;
  const double log_value = 0.5 * (std::log(nud) - std::log(total)) +
                           centered * centered / (2.0 * nd) -
                           post * post / (2.0 * nd) +
                           s_total * s_total / (2.0 * total) -
                           s_nu * s_nu / (2.0 * nud);
  return ExtendedValue::from_log(log_value);
}

ExtendedValue half_flat_eprocess(const StreamStats& stats, double mu0) {
  if (stats.n < 1)
    throw std::domain_error("half_flat_eprocess: undefined at n = 0");
  const double n = static_cast<double>(stats.n);
  const double x = (stats.sum - n * mu0) / std::sqrt(n);  // sqrt(n)(mean - mu0)
  const double log_value = -0.5 * std::log(4.0 * n) + log_v_function(x);
  return ExtendedValue::from_log(log_value);
}

void ProcessSpec::validate() const {
  switch (family) {
    case ProcessFamily::kLr:
      if (!mu) throw std::invalid_argument("ProcessSpec: lr requires mu");
      break;
    case ProcessFamily::kGaussianMix:
      require_positive(c, "ProcessSpec: gaussian_mix requires c > 0");
      break;
    case ProcessFamily::kFlatMix:
      break;
    case ProcessFamily::kFlatMixThick:
      require_positive(thickness,
                       "ProcessSpec: flat_mix_thick requires thickness > 0");
      break;
    case ProcessFamily::kShiftedMix:
      require_positive(c, "ProcessSpec: shifted_mix requires c > 0");
      if (!eta) throw std::invalid_argument("ProcessSpec: shifted_mix requires eta");
      break;
    case ProcessFamily::kConditioned:
    case ProcessFamily::kDivision:
      require_count(nu, "ProcessSpec: requires nu >= 1");
      break;
    case ProcessFamily::kHalfFlat:
      break;
  }
}

ExtendedValue ProcessSpec::evaluate(const StreamStats& stats) const {
  switch (family) {
    case ProcessFamily::kLr:
      return lr_gaussian(stats, *mu, mu0);
    case ProcessFamily::kGaussianMix:
      return gaussian_mixture(stats, *c, mu0);
    case ProcessFamily::kFlatMix:
      return flat_mixture(stats, mu0, 1.0);
    case ProcessFamily::kFlatMixThick:
      return flat_mixture(stats, mu0, thickness.value_or(1.0));
    case ProcessFamily::kShiftedMix:
      return shifted_gaussian_mixture(stats, *c, *eta, mu0);
    case ProcessFamily::kConditioned:
      return conditioned_process(stats, *nu, mu0);
    case ProcessFamily::kDivision:
      throw std::invalid_argument(
          "ProcessSpec: division requires a PrefixPair");
    case ProcessFamily::kHalfFlat:
      return half_flat_eprocess(stats, mu0);
  }
  throw std::logic_error("ProcessSpec: unknown family");
}

ExtendedValue ProcessSpec::evaluate(const PrefixPair& prefix) const {
  if (family != ProcessFamily::kDivision) return evaluate(prefix.at_total);
  if (prefix.nu() != require_count(nu, "ProcessSpec: requires nu >= 1"))
    throw std::invalid_argument("ProcessSpec: prefix burn-in differs from nu");
  return division_process(prefix, mu0);
}

std::int64_t ProcessSpec::first_index() const {
  switch (family) {
    case ProcessFamily::kHalfFlat:
      return 1;
    case ProcessFamily::kDivision:
      // first observation index past the burn-in segment
      return require_count(nu, "ProcessSpec: requires nu >= 1") + 1;
    default:
      return 0;
  }
}

MultiplicativeSim::MultiplicativeSim(double theta, StartLaw start, Rng rng)
    : theta_(theta), start_(start), rng_(rng), value_(ExtendedValue::one()),
      log_finite_part_(0.0) {
  switch (start_) {
    case StartLaw::kCauchyAbs:
      log_finite_part_ = std::log(std::abs(rng_.cauchy()));
      value_ = ExtendedValue::from_log(log_finite_part_);
      break;
    case StartLaw::kAtomHalfInf:
      if (rng_.bernoulli(0.5)) {
        value_ = ExtendedValue::infinity();
      } else {
        value_ = ExtendedValue::one();
      }
      break;
    case StartLaw::kConstInfThen:
    case StartLaw::kInfUntilFirstSuccess:
      log_finite_part_ = std::log(std::abs(rng_.cauchy()));
      value_ = ExtendedValue::infinity();
      break;
  }
}

ExtendedValue MultiplicativeSim::step() {
  const bool xi = rng_.bernoulli(theta_);
  const double log_factor = xi ? std::log(1.5) : std::log(0.5);
  switch (start_) {
    case StartLaw::kCauchyAbs:
      log_finite_part_ += log_factor;
      value_ = ExtendedValue::from_log(log_finite_part_);
      break;
    case StartLaw::kAtomHalfInf:
      // infinity times a positive factor stays infinity
      value_ = value_ * ExtendedValue::from_log(log_factor);
      break;
    case StartLaw::kConstInfThen:
      log_finite_part_ += log_factor;
      value_ = ExtendedValue::from_log(log_finite_part_);
      break;
    case StartLaw::kInfUntilFirstSuccess:
      log_finite_part_ += log_factor;
      any_success_ = any_success_ || xi;
      value_ = any_success_ ? ExtendedValue::from_log(log_finite_part_)
                            : ExtendedValue::infinity();
      break;
  }
  return value_;
}

SimPath simulate_multiplicative(double theta, StartLaw start,
                                std::int64_t horizon, std::uint64_t seed,
                                std::uint64_t path_index) {
  if (horizon < 1)
    throw std::invalid_argument("simulate_multiplicative: horizon must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("simulate_multiplicative: theta outside [0, 1]");
  SimPath path;
  path.seed = seed;
  path.theta = theta;
  path.values.reserve(static_cast<std::size_t>(horizon) + 1);
  MultiplicativeSim sim(theta, start, Rng::for_path(seed, path_index));
  path.values.push_back(sim.current());
  for (std::int64_t i = 0; i < horizon; ++i) path.values.push_back(sim.step());
  return path;
}

}  // namespace ensm
