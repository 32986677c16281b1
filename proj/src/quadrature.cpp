#include "ccmsel/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "ccmsel/errors.hpp"

namespace ccmsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 15-point Kronrod abscissae (descending, last is the centre) and weights,
// with the embedded 7-point Gauss weights for the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;  // integral * exp(-shift)
  double error;  // same scale
  bool operator<(const Interval& o) const { return error < o.error; }
};

class Integrator {
 public:
  Integrator(const LogIntegrand& f, double c, double scale, bool mapped)
      : f_(f), c_(c), scale_(scale), mapped_(mapped) {}

  double log_at(double t) {
    ++evaluations_;
    double v;
    if (mapped_) {
      if (t >= 1.0) return -kInf;
      const double x = c_ + scale_ * t / (1.0 - t);
      v = f_(x) + std::log(scale_) - 2.0 * std::log1p(-t);
    } else {
      v = f_(t);
    }
    if (std::isnan(v)) {
      std::ostringstream os;
      os << "integrand returned NaN at " << (mapped_ ? c_ + scale_ * t / (1.0 - t) : t);
      throw NumericError(os.str());
    }
    return v;
  }

  /// Evaluates one interval. Raises `shift` first if any node exceeds it.
  Interval rule(double a, double b, double& shift, bool& shifted) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> lf;
    for (std::size_t j = 0; j < 7; ++j) {
      lf[2 * j] = log_at(centre - half * kXgk[j]);
      lf[2 * j + 1] = log_at(centre + half * kXgk[j]);
    }
    lf[14] = log_at(centre);
    const double local_max = *std::max_element(lf.begin(), lf.end());
    shifted = false;
    if (local_max > shift) {
      shifted = true;
      shift = local_max;
    }
    std::array<double, 15> fv;
    for (std::size_t i = 0; i < 15; ++i) fv[i] = std::exp(lf[i] - shift);

    double kronrod = kWgk[7] * fv[14];
    double gauss = kWg[3] * fv[14];
    for (std::size_t j = 0; j < 7; ++j) {
      const double pair = fv[2 * j] + fv[2 * j + 1];
      kronrod += kWgk[j] * pair;
      if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[7] * std::abs(fv[14] - mean);
    for (std::size_t j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    }
    double err = std::abs((kronrod - gauss) * half);
    resasc *= std::abs(half);
    if (resasc != 0.0 && err != 0.0) {
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double value = kronrod * half;
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
    return {a, b, value, err};
  }

  double to_x(double t) const { return mapped_ ? c_ + scale_ * t / (1.0 - t) : t; }

  std::int64_t evaluations_ = 0;

 private:
  const LogIntegrand& f_;
  double c_, scale_;
  bool mapped_;
};

}  // namespace

LogQuadratureResult integrate_log(const LogIntegrand& log_f, double lower, double upper,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts, double tail_scale) {
  if (!(lower < upper)) throw NumericError("integration interval is empty");
  if (!std::isfinite(lower)) throw NumericError("lower integration limit must be finite");

  std::vector<double> cuts{lower};
  for (double x : breakpoints) {
    if (x > lower && x < upper && std::isfinite(x)) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const bool infinite = upper == kInf;
  if (!infinite) cuts.push_back(upper);

  // Finite part and mapped tail are separate integrators sharing one shift.
  Integrator finite(log_f, 0.0, 1.0, false);
  Integrator tail(log_f, cuts.back(), tail_scale > 0 ? tail_scale : 1.0, true);

  double shift = -kInf;
  std::vector<std::pair<Interval, Integrator*>> pieces;
  auto rescale = [&](double old_shift) {
    if (old_shift == -kInf) return;
    const double factor = std::exp(old_shift - shift);
    for (auto& [iv, owner] : pieces) {
      iv.value *= factor;
      iv.error *= factor;
    }
  };
  auto add = [&](Integrator& which, double a, double b) {
    const double before = shift;
    bool shifted = false;
    auto iv = which.rule(a, b, shift, shifted);
    if (shifted) rescale(before);
    pieces.emplace_back(iv, &which);
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add(finite, cuts[i], cuts[i + 1]);
  if (infinite) {
    // a few initial cuts in t so the tail is not judged by one rule
    add(tail, 0.0, 0.5);
    add(tail, 0.5, 0.9);
    add(tail, 0.9, 1.0);
  }

  auto totals = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& [iv, owner] : pieces) {
      v += iv.value;
      e += iv.error;
    }
    return std::make_pair(v, e);
  };

  while (true) {
    auto [value, error] = totals();
    if (shift == -kInf) {
      return {-kInf, 0.0, finite.evaluations_ + tail.evaluations_,
              static_cast<std::int64_t>(pieces.size())};
    }
    if (value > 0 && error <= opts.log_tolerance * value) {
      return {shift + std::log(value), error / value, finite.evaluations_ + tail.evaluations_,
              static_cast<std::int64_t>(pieces.size())};
    }
    if (static_cast<std::int64_t>(pieces.size()) >= opts.max_intervals) {
      std::sort(pieces.begin(), pieces.end(),
                [](const auto& x, const auto& y) { return x.first.error > y.first.error; });
      std::ostringstream os;
      os << "quadrature did not converge: relative error " << (value > 0 ? error / value : kInf)
         << " after " << pieces.size() << " intervals; worst intervals:";
      for (std::size_t i = 0; i < std::min<std::size_t>(5, pieces.size()); ++i) {
        const auto& [iv, owner] = pieces[i];
        os << " [" << owner->to_x(iv.a) << ", " << owner->to_x(iv.b) << "] err=" << iv.error;
      }
      throw NumericError(os.str());
    }
    auto worst = std::max_element(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) {
      return x.first.error < y.first.error;
    });
    const auto [iv, owner] = *worst;
    pieces.erase(worst);
    const double mid = 0.5 * (iv.a + iv.b);
    if (!(mid > iv.a && mid < iv.b)) {
      // interval cannot be split further in floating point; accept it as is
      pieces.emplace_back(Interval{iv.a, iv.b, iv.value, 0.0}, owner);
      continue;
    }
    add(*owner, iv.a, mid);
    add(*owner, mid, iv.b);
  }
}

LogQuadratureResult integrate_log_peaked(const LogIntegrand& log_f, double lower, double upper,
                                         double mode, double width,
                                         const QuadratureOptions& opts) {
  constexpr double kDrop = 60.0;
  if (!(width > 0) || !std::isfinite(width)) width = 1.0;
  mode = std::clamp(mode, lower, std::isfinite(upper) ? upper : mode);
  const double peak = log_f(mode);
  std::vector<double> cuts;
  for (double m : {1.0, 3.0, 10.0, 30.0}) {
    cuts.push_back(mode - m * width);
    cuts.push_back(mode + m * width);
  }
  cuts.push_back(mode);
  if (!std::isfinite(peak)) {
    // endpoint singularity or zero at the mode; no safe truncation point
    return integrate_log(log_f, lower, upper, cuts, opts, std::max(width, std::abs(mode)));
  }

  // Walk outwards in growing steps until the integrand is kDrop nats down.
  double hi = upper;
  for (double step = width; mode + step < upper; step *= 2.0) {
    if (log_f(mode + step) < peak - kDrop) {
      hi = mode + step;
      break;
    }
    if (step > 1e300) break;
  }
  double lo = lower;
  for (double step = width; mode - step > lower; step *= 2.0) {
    if (log_f(mode - step) < peak - kDrop) {
      lo = mode - step;
      break;
    }
  }

  return integrate_log(log_f, lo, hi, cuts, opts, std::max(width, std::abs(mode)));
}

}  // namespace ccmsel
