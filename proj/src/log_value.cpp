#include "ccmsel/log_value.hpp"

#include <algorithm>

namespace ccmsel {

double log_sum_exp(std::span<const double> xs) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double hi = neg_inf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == neg_inf) return neg_inf;
  if (hi == std::numeric_limits<double>::infinity()) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

double log_mean_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

double log_factorial(double n) { return std::lgamma(n + 1.0); }

double log_binomial(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_multinomial(std::span<const std::int64_t> parts) {
  std::int64_t total = 0;
  double denom = 0.0;
  for (auto p : parts) {
    total += p;
    denom += log_factorial(static_cast<double>(p));
  }
  return log_factorial(static_cast<double>(total)) - denom;
}

}  // namespace ccmsel
