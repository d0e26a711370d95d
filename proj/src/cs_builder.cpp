#include "ensm/cs_builder.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ensm/numerics.hpp"

namespace ensm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_n(const StreamStats& stats) {
  if (stats.n < 1) throw std::domain_error("confidence sequence requires n >= 1");
}

CsInterval whole_line(std::int64_t n, std::string method_id) {
  return {n, -kInf, kInf, std::move(method_id), true};
}

CsInterval centered(const StreamStats& stats, double radius_sq,
                    std::string method_id) {
  if (!(radius_sq >= 0.0)) return whole_line(stats.n, std::move(method_id));
  const double radius = std::sqrt(radius_sq);
  const double center = stats.mean();
  return {stats.n, center - radius, center + radius, std::move(method_id),
          false};
}

double flat_radius_sq(const StreamStats& stats, double solved_constant) {
  const double n = static_cast<double>(stats.n);
  return std::log(n / (solved_constant * solved_constant)) / n;
}

double gaussian_mixture_radius_sq(std::int64_t count, double c, double alpha) {
  const double n = static_cast<double>(count);
  const double c2 = c * c;
  return std::log((c2 + n) / (c2 * alpha * alpha)) * (1.0 + c2 / n) / n;
}

double conditioned_radius_sq(std::int64_t count, std::int64_t nu, double alpha) {
  const double n = static_cast<double>(count);
  const double total = n + static_cast<double>(nu);
  return total * std::log(total / (alpha * alpha * static_cast<double>(nu))) /
         (n * n);
}

double one_sided_margin(std::int64_t count, double c_alpha) {
  const double n = static_cast<double>(count);
  const double target_log = 0.5 * std::log(4.0 * n) - std::log(c_alpha);
  return v_inverse(ExtendedValue::from_log(target_log)) / std::sqrt(n);
}

}  // namespace

CsInterval cs_gaussian_mixture(const StreamStats& stats, double c,
                               double alpha) {
  require_n(stats);
  if (!(c > 0.0)) throw std::invalid_argument("cs_gaussian_mixture: c must be > 0");
  return centered(stats, gaussian_mixture_radius_sq(stats.n, c, alpha),
                  "cs_gaussian_mixture");
}

CsInterval cs_flat_gaussian(const StreamStats& stats, double alpha) {
  require_n(stats);
  return centered(stats, flat_radius_sq(stats, solve_a_alpha(alpha).constant),
                  "cs_flat_gaussian");
}

CsInterval cs_flat_subgaussian(const StreamStats& stats, double alpha) {
  require_n(stats);
  return centered(stats, flat_radius_sq(stats, solve_b_alpha(alpha).constant),
                  "cs_flat_subgaussian");
}

CsInterval cs_shifted(const StreamStats& stats, double c, double eta,
                      double alpha) {
  require_n(stats);
  if (!(c > 0.0)) throw std::invalid_argument("cs_shifted: c must be > 0");
  const double n = static_cast<double>(stats.n);
  const double c2 = c * c;
  const double guess_gap = stats.mean() - eta;
  const double radius_sq = (std::log((c2 + n) / (c2 * alpha * alpha)) +
                            c2 * n * guess_gap * guess_gap / (c2 + n)) /
                           n;
  return centered(stats, radius_sq, "cs_shifted");
}

CsInterval cs_conditioned(const StreamStats& stats, std::int64_t nu,
                          double alpha) {
  require_n(stats);
  if (nu < 1) throw std::invalid_argument("cs_conditioned: nu must be >= 1");
  return centered(stats, conditioned_radius_sq(stats.n, nu, alpha),
                  "cs_conditioned");
}

CsInterval cs_division(const PrefixPair& prefix, double alpha) {
  const std::int64_t nu = prefix.nu();
  const std::int64_t n = prefix.post_count();
  if (nu < 1 || n < 1)
    throw std::invalid_argument("cs_division: requires nu >= 1 and n >= 1");
  const double nd = static_cast<double>(n);
  const double nud = static_cast<double>(nu);
  const double total = nd + nud;
  const double s_nu = prefix.at_nu.sum;
  const double s_total = prefix.at_total.sum;
  const double post = s_total - s_nu;
  const double radius_sq =
      (std::log(total / (alpha * alpha * nud)) + post * post / nd -
       s_total * s_total / total + s_nu * s_nu / nud) /
      nd;
  if (!(radius_sq >= 0.0)) return whole_line(n, "cs_division");
  const double radius = std::sqrt(radius_sq);
  const double center = prefix.post_mean();
  return {n, center - radius, center + radius, "cs_division", false};
}

CsInterval cs_one_sided(const StreamStats& stats, double alpha) {
  require_n(stats);
  const double c_alpha = solve_c_alpha(alpha).constant;
  return {stats.n, stats.mean() - one_sided_margin(stats.n, c_alpha), kInf,
          "cs_one_sided", false};
}

double asymptotic_radius(AsymptoticKind kind, std::int64_t n, double alpha) {
  const double nd = static_cast<double>(n);
  switch (kind) {
    case AsymptoticKind::kGaussianFlatDisplay:
      return std::sqrt(
          std::log(2.0 * nd / (std::numbers::pi * alpha * alpha)) / (2.0 * nd));
    case AsymptoticKind::kGaussianFlatProof:
      return std::sqrt(
          std::log(2.0 * nd / (std::numbers::pi * alpha * alpha)) / nd);
    case AsymptoticKind::kSubgaussianFlat:
      return std::sqrt((std::log(4.0 * nd / (alpha * alpha)) +
                        2.0 * std::log(std::log(1.0 / alpha))) /
                       nd);
  }
  throw std::logic_error("asymptotic_radius: unknown kind");
}

CsFamily::CsFamily(Method method, std::string method_id, const CsParams& params)
    : method_(method), method_id_(std::move(method_id)), params_(params) {
  switch (method_) {
    case Method::kFlatGaussian:
      solved_constant_ = solve_a_alpha(params_.alpha).constant;
      break;
    case Method::kFlatSubgaussian:
      solved_constant_ = solve_b_alpha(params_.alpha).constant;
      break;
    case Method::kOneSided:
      solved_constant_ = solve_c_alpha(params_.alpha).constant;
      break;
    default:
      break;
  }
}

CsFamily CsFamily::make(std::string_view method_id, const CsParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0))
    throw std::invalid_argument("CsFamily: alpha outside (0, 1)");
  if (method_id == "cs_gaussian_mixture")
    return {Method::kGaussianMixture, "cs_gaussian_mixture", params};
  if (method_id == "cs_flat_gaussian")
    return {Method::kFlatGaussian, "cs_flat_gaussian", params};
  if (method_id == "cs_flat_subgaussian")
    return {Method::kFlatSubgaussian, "cs_flat_subgaussian", params};
  if (method_id == "cs_shifted") return {Method::kShifted, "cs_shifted", params};
  if (method_id == "cs_conditioned")
    return {Method::kConditioned, "cs_conditioned", params};
  if (method_id == "cs_division") return {Method::kDivision, "cs_division", params};
  if (method_id == "cs_one_sided")
    return {Method::kOneSided, "cs_one_sided", params};
  throw std::invalid_argument("CsFamily: unknown method_id");
}

bool CsFamily::data_free_radius() const {
  return method_ != Method::kShifted && method_ != Method::kDivision;
}

bool CsFamily::one_sided() const { return method_ == Method::kOneSided; }

std::int64_t CsFamily::division_burn_in() const {
  return method_ == Method::kDivision ? params_.nu : 0;
}

double CsFamily::radius_at(std::int64_t n) const {
  if (n < 1) throw std::domain_error("CsFamily::radius_at: n must be >= 1");
  switch (method_) {
    case Method::kGaussianMixture:
      return std::sqrt(gaussian_mixture_radius_sq(n, params_.c, params_.alpha));
    case Method::kFlatGaussian:
    case Method::kFlatSubgaussian: {
      const double r2 =
          std::log(static_cast<double>(n) / (solved_constant_ * solved_constant_)) /
          static_cast<double>(n);
      return r2 >= 0.0 ? std::sqrt(r2) : kInf;
    }
    case Method::kConditioned:
      return std::sqrt(conditioned_radius_sq(n, params_.nu, params_.alpha));
    case Method::kOneSided:
      return one_sided_margin(n, solved_constant_);
    default:
      throw std::logic_error("CsFamily::radius_at: radius depends on the data");
  }
}

CsInterval CsFamily::at(const StreamStats& stats) const {
  switch (method_) {
    case Method::kGaussianMixture:
      return cs_gaussian_mixture(stats, params_.c, params_.alpha);
    case Method::kFlatGaussian:
      return centered(stats, flat_radius_sq(stats, solved_constant_),
                      "cs_flat_gaussian");
    case Method::kFlatSubgaussian:
      return centered(stats, flat_radius_sq(stats, solved_constant_),
                      "cs_flat_subgaussian");
    case Method::kShifted:
      return cs_shifted(stats, params_.c, params_.eta, params_.alpha);
    case Method::kConditioned:
      return cs_conditioned(stats, params_.nu, params_.alpha);
    case Method::kOneSided:
      require_n(stats);
      return {stats.n, stats.mean() - one_sided_margin(stats.n, solved_constant_),
              kInf, "cs_one_sided", false};
    case Method::kDivision:
      throw std::invalid_argument("CsFamily: cs_division requires a PrefixPair");
  }
  throw std::logic_error("CsFamily: unknown method");
}

CsInterval CsFamily::at(const PrefixPair& prefix) const {
  if (method_ != Method::kDivision) return at(prefix.at_total);
  return cs_division(prefix, params_.alpha);
}

CsStream::CsStream(CsFamily family) : family_(std::move(family)) {}

CsInterval CsStream::push(double x) {
  stats_.push(x);
  const std::int64_t burn_in = family_.division_burn_in();
  if (burn_in > 0) {
    if (stats_.n <= burn_in) {
      burn_in_ = stats_;
      return whole_line(stats_.n, family_.method_id());
    }
    CsInterval ci = family_.at(PrefixPair(burn_in_, stats_));
    ci.n = stats_.n;  // report the observation index, not the post count
    return ci;
  }
  return family_.at(stats_);
}

}  // namespace ensm
