#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace conlearn {

/// A probability (or any non-negative quantity) stored as its natural log.
///
/// Exact zero is represented by -infinity and is absorbing under
/// multiplication, so products of many rates stay finite in log space
/// without special cases at the call site.
class LogProb {
public:
  constexpr LogProb() = default;

  static constexpr LogProb zero() { return LogProb{}; }
  static constexpr LogProb one() { return from_log(0.0); }
  static constexpr LogProb from_log(double log_value) {
    LogProb p;
    p.value_ = log_value;
    return p;
  }
  static LogProb from_linear(double x) {
    return x > 0.0 ? from_log(std::log(x)) : zero();
  }

  constexpr double log() const { return value_; }
  double linear() const { return is_zero() ? 0.0 : std::exp(value_); }
  constexpr bool is_zero() const {
    return value_ == -std::numeric_limits<double>::infinity();
  }

  friend LogProb operator*(LogProb a, LogProb b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log(a.value_ + b.value_);
  }
  // Division by zero is the caller's problem; the result is +inf.
  friend LogProb operator/(LogProb a, LogProb b) {
    if (a.is_zero()) return zero();
    return from_log(a.value_ - b.value_);
  }
  friend LogProb operator+(LogProb a, LogProb b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.value_, b.value_);
    const double lo = std::min(a.value_, b.value_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }
  LogProb& operator*=(LogProb o) { return *this = *this * o; }
  LogProb& operator+=(LogProb o) { return *this = *this + o; }

  friend constexpr bool operator==(LogProb a, LogProb b) {
    return a.value_ == b.value_;
  }
  friend constexpr auto operator<=>(LogProb a, LogProb b) {
    return a.value_ <=> b.value_;
  }

private:
  double value_ = -std::numeric_limits<double>::infinity();
};

/// Numerically stable log(sum(exp(x_i))). Returns -inf for an empty range or
/// when every entry is -inf.
double log_sum_exp(std::span<const double> logs);

} // namespace conlearn
