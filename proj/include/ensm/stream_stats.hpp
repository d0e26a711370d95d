#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace ensm {

// Sufficient statistics (n, S_n, V_n) of an observation prefix.
struct StreamStats {
  std::int64_t n = 0;
  double sum = 0.0;     // S_n
  double sum_sq = 0.0;  // V_n

  void push(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }

  double mean() const {
    if (n < 1) throw std::domain_error("StreamStats::mean requires n >= 1");
    return sum / static_cast<double>(n);
  }

  static StreamStats of(std::span<const double> xs) {
    StreamStats s;
    for (double x : xs) s.push(x);
    return s;
  }
};

// Statistics at a burn-in point nu and at the full prefix n + nu.
struct PrefixPair {
  StreamStats at_nu;
  StreamStats at_total;

  PrefixPair(StreamStats nu_stats, StreamStats total_stats)
      : at_nu(nu_stats), at_total(total_stats) {
    if (at_nu.n > at_total.n)
      throw std::invalid_argument("PrefixPair: at_nu is not a prefix of at_total");
  }

  std::int64_t nu() const { return at_nu.n; }
  std::int64_t post_count() const { return at_total.n - at_nu.n; }
  double post_sum() const { return at_total.sum - at_nu.sum; }
  double post_mean() const {
    if (post_count() < 1)
      throw std::domain_error("PrefixPair: post-burn-in segment is empty");
    return post_sum() / static_cast<double>(post_count());
  }
};

}  // namespace ensm
