#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace ensm {

// A number in [0, infinity], stored on the natural-log scale.
// log_value == -inf encodes exact 0, log_value == +inf encodes infinity.
// Multiplication follows the measure-theoretic convention 0 * inf = 0.
class ExtendedValue {
public:
  constexpr ExtendedValue() : log_value_(-kInf) {}

  static constexpr ExtendedValue from_log(double log_value) {
    return ExtendedValue(log_value);
  }

  static ExtendedValue from_value(double value) {
    return ExtendedValue(std::log(value));
  }

  static constexpr ExtendedValue zero() { return ExtendedValue(-kInf); }
  static constexpr ExtendedValue one() { return ExtendedValue(0.0); }
  static constexpr ExtendedValue infinity() { return ExtendedValue(kInf); }

  constexpr double log_value() const { return log_value_; }

  // Saturates to +inf above the representable range; never traps.
  double value() const { return std::exp(log_value_); }

  // value() capped at `cap` (cap finite, > 0). Infinite values contribute cap.
  double truncated(double cap) const {
    if (log_value_ >= std::log(cap)) return cap;
    return std::exp(log_value_);
  }

  constexpr bool is_zero() const { return log_value_ == -kInf; }
  constexpr bool is_infinite() const { return log_value_ == kInf; }
  constexpr bool is_finite() const { return !is_zero() && !is_infinite(); }

  friend ExtendedValue operator*(ExtendedValue a, ExtendedValue b) {
    if (a.is_zero() || b.is_zero()) return zero();
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtendedValue(a.log_value_ + b.log_value_);
  }

  ExtendedValue& operator*=(ExtendedValue o) { return *this = *this * o; }

  // Maps 0 <-> inf. Quotients of processes in this codebase only ever
  // divide by finite positive values; the endpoint rule matches 1/0 = inf.
  ExtendedValue reciprocal() const { return ExtendedValue(-log_value_); }

  friend ExtendedValue operator/(ExtendedValue a, ExtendedValue b) {
    return a * b.reciprocal();
  }

  // Total order agreeing with the order on log_value (no NaNs by invariant).
  friend constexpr bool operator==(ExtendedValue a, ExtendedValue b) {
    return a.log_value_ == b.log_value_;
  }
  friend constexpr bool operator<(ExtendedValue a, ExtendedValue b) {
    return a.log_value_ < b.log_value_;
  }
  friend constexpr bool operator<=(ExtendedValue a, ExtendedValue b) {
    return a.log_value_ <= b.log_value_;
  }
  friend constexpr bool operator>(ExtendedValue a, ExtendedValue b) {
    return b < a;
  }
  friend constexpr bool operator>=(ExtendedValue a, ExtendedValue b) {
    return b <= a;
  }

private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  constexpr explicit ExtendedValue(double lv) : log_value_(lv) {}

  double log_value_;
};

}  // namespace ensm
