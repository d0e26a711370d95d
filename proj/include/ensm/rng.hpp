#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace ensm {

// Counter-style splitmix64 generator. Cheap to construct, so each Monte
// Carlo replication gets its own stream via for_path(seed, path_index);
// results are then independent of thread scheduling.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x7f4a7c15u)) {}

  static Rng for_path(std::uint64_t seed, std::uint64_t path_index) {
    Rng r(0);
    r.state_ = mix(mix(seed) + 0x9e3779b97f4a7c15ull * (path_index + 1));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller (one draw per call, two uniforms consumed).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard Cauchy.
  double cauchy() {
    return std::tan(std::numbers::pi * (uniform() - 0.5));
  }

  bool bernoulli(double p) { return uniform() < p; }

  double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace ensm
