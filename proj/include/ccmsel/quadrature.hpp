#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace ccmsel {

struct QuadratureOptions {
  /// Target absolute error of the returned log integral (equivalently, the
  /// relative error of the integral).
  double log_tolerance = 1e-8;
  std::int64_t max_intervals = 4000;
};

struct LogQuadratureResult {
  double log_value = 0.0;
  /// Estimated absolute error of log_value.
  double log_error = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t intervals = 0;
};

using LogIntegrand = std::function<double(double)>;

/// log of the integral of exp(log_f) over [lower, upper] by adaptive
/// 7/15-point Gauss–Kronrod subdivision. Interval contributions are kept
/// relative to a running maximum of log_f, so integrands far outside the
/// double range are fine. `upper` may be +inf; the last segment is then
/// mapped to [0, 1) with x = c + scale * t / (1 - t). Optional interior
/// breakpoints seed the initial partition.
///
/// Throws NumericError (listing the worst intervals) if the tolerance is not
/// met within max_intervals, or if log_f returns NaN.
LogQuadratureResult integrate_log(const LogIntegrand& log_f, double lower, double upper,
                                  std::span<const double> breakpoints = {},
                                  const QuadratureOptions& opts = {}, double tail_scale = 1.0);

/// integrate_log for unimodal integrands with a known mode and width (e.g.
/// 1/sqrt(-d2 log_f) at the mode). The domain is cut where log_f has fallen
/// 60 nats below its peak and breakpoints are placed at mode +- width
/// multiples, so very sharp peaks on long domains are not missed.
LogQuadratureResult integrate_log_peaked(const LogIntegrand& log_f, double lower, double upper,
                                         double mode, double width,
                                         const QuadratureOptions& opts = {});

}  // namespace ccmsel
