#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>

namespace ccmsel {

/// A nonnegative real carried as its natural logarithm. Zero is an explicit
/// state rather than -inf so that arithmetic never produces NaN.
///
/// Volume factors for state networks exceed 10^28000 and evidences sit
/// below 10^-28000, so every count and probability in the library flows
/// through this type or through plain `double` logs.
class LogValue {
 public:
  constexpr LogValue() = default;

  static LogValue from_log(double log_magnitude) {
    LogValue v;
    if (log_magnitude == -std::numeric_limits<double>::infinity()) return v;
    v.log_ = log_magnitude;
    v.zero_ = false;
    return v;
  }

  /// x must be >= 0.
  static LogValue from_linear(double x) {
    return x == 0.0 ? LogValue{} : from_log(std::log(x));
  }

  static constexpr LogValue zero() { return LogValue{}; }
  static LogValue one() { return from_log(0.0); }

  bool is_zero() const noexcept { return zero_; }

  /// Natural log; -inf for zero.
  double log() const noexcept {
    return zero_ ? -std::numeric_limits<double>::infinity() : log_;
  }

  double log10() const noexcept { return log() / std::numbers::ln10; }

  /// exp(log) with ordinary overflow/underflow.
  double linear() const noexcept { return zero_ ? 0.0 : std::exp(log_); }

  /// Max-shifted addition; exact when the operands differ by any amount.
  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.zero_) return b;
    if (b.zero_) return a;
    const double hi = std::max(a.log_, b.log_);
    const double lo = std::min(a.log_, b.log_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.zero_ || b.zero_) return LogValue{};
    return from_log(a.log_ + b.log_);
  }

  /// Division by zero yields +inf magnitude.
  friend LogValue operator/(LogValue a, LogValue b) {
    if (a.zero_) return LogValue{};
    if (b.zero_) return from_log(std::numeric_limits<double>::infinity());
    return from_log(a.log_ - b.log_);
  }

  LogValue& operator+=(LogValue o) { return *this = *this + o; }
  LogValue& operator*=(LogValue o) { return *this = *this * o; }

  friend bool operator==(LogValue a, LogValue b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.log_ == b.log_);
  }

 private:
  double log_ = 0.0;
  bool zero_ = true;
};

/// log(sum_i exp(x_i)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> xs);

/// log(mean_i exp(x_i)).
double log_mean_exp(std::span<const double> xs);

/// log C(n, k) via lgamma; -inf when k is outside [0, n].
double log_binomial(double n, double k);

/// log B(a, b).
double log_beta(double a, double b);

/// log n!
double log_factorial(double n);

/// log( (sum parts)! / prod parts! ).
double log_multinomial(std::span<const std::int64_t> parts);

}  // namespace ccmsel
