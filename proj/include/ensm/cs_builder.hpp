#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ensm/stream_stats.hpp"
#include "ensm/thresholds.hpp"

namespace ensm {

// One confidence interval of a running confidence sequence. Endpoints may
// be infinite; `vacuous` flags intervals degraded to the whole line.
struct CsInterval {
  std::int64_t n = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::string method_id;
  bool vacuous = false;
};

CsInterval cs_gaussian_mixture(const StreamStats& stats, double c, double alpha);
CsInterval cs_flat_gaussian(const StreamStats& stats, double alpha);
CsInterval cs_flat_subgaussian(const StreamStats& stats, double alpha);
CsInterval cs_shifted(const StreamStats& stats, double c, double eta,
                      double alpha);
CsInterval cs_conditioned(const StreamStats& stats, std::int64_t nu,
                          double alpha);
CsInterval cs_division(const PrefixPair& prefix, double alpha);
// Lower confidence bound only; upper is +infinity.
CsInterval cs_one_sided(const StreamStats& stats, double alpha);

enum class AsymptoticKind {
  kGaussianFlatDisplay,  // sqrt(log(2n/(pi alpha^2)) / (2n))
  kGaussianFlatProof,    // sqrt(log(2n/(pi alpha^2)) / n)
  kSubgaussianFlat,      // sqrt((log(4n/alpha^2) + 2 log log(1/alpha)) / n)
};

// Small-alpha radius approximations, kept verbatim for comparison tests.
// The two Gaussian variants differ by a factor sqrt(2); see the tests.
double asymptotic_radius(AsymptoticKind kind, std::int64_t n, double alpha);

struct CsParams {
  double alpha = 0.05;
  double c = 1.0;
  double eta = 0.0;
  std::int64_t nu = 1;
  double thickness = 1.0;
};

// A CS method with its solved constants precomputed, for streaming use.
class CsFamily {
public:
  // method_id is one of: cs_gaussian_mixture, cs_flat_gaussian,
  // cs_flat_subgaussian, cs_shifted, cs_conditioned, cs_division,
  // cs_one_sided. Throws std::invalid_argument otherwise.
  static CsFamily make(std::string_view method_id, const CsParams& params);

  CsInterval at(const StreamStats& stats) const;
  CsInterval at(const PrefixPair& prefix) const;

  // Radius at time n for methods whose radius does not depend on the data
  // (all methods except cs_shifted and cs_division). For cs_one_sided this
  // is the one-sided margin mean - lower.
  double radius_at(std::int64_t n) const;
  bool data_free_radius() const;
  bool one_sided() const;

  const std::string& method_id() const { return method_id_; }
  double alpha() const { return params_.alpha; }
  std::int64_t division_burn_in() const;

private:
  enum class Method { kGaussianMixture, kFlatGaussian, kFlatSubgaussian,
                      kShifted, kConditioned, kDivision, kOneSided };

  CsFamily(Method method, std::string method_id, const CsParams& params);

  Method method_;
  std::string method_id_;
  CsParams params_;
  double solved_constant_ = 0.0;  // a_alpha / b_alpha / c_alpha when used
};

// Streaming driver: push observations one at a time and get the running CS.
// For cs_division the first `nu` observations are the burn-in segment and
// yield vacuous whole-line intervals.
class CsStream {
public:
  explicit CsStream(CsFamily family);

  CsInterval push(double x);
  const StreamStats& stats() const { return stats_; }

private:
  CsFamily family_;
  StreamStats stats_;
  StreamStats burn_in_;
};

}  // namespace ensm
