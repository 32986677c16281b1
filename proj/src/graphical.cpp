#include "ccmsel/graphical.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "ccmsel/errors.hpp"

namespace ccmsel {

std::optional<std::int64_t> erdos_gallai_violation(std::span<const std::int64_t> degrees) {
  std::vector<std::int64_t> d(degrees.begin(), degrees.end());
  std::int64_t total = 0;
  for (auto x : d) {
    if (x < 0) return 1;
    total += x;
  }
  if (total % 2 != 0) return 0;
  std::sort(d.begin(), d.end(), std::greater<>());
  const auto n = static_cast<std::int64_t>(d.size());

  // suffix[i] = sum of d[i..n)
  std::vector<std::int64_t> suffix(d.size() + 1, 0);
  for (std::int64_t i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + d[i];

  std::int64_t prefix = 0;
  std::int64_t at_least = n;  // # of entries >= k, non-increasing in k
  for (std::int64_t k = 1; k <= n; ++k) {
    prefix += d[k - 1];
    while (at_least > 0 && d[at_least - 1] < k) --at_least;
    const std::int64_t split = std::max(at_least, k);
    const std::int64_t tail = k * (split - k) + suffix[split];
    if (prefix > k * (k - 1) + tail) return k;
  }
  return std::nullopt;
}

bool is_graphical(std::span<const std::int64_t> degrees) {
  return !erdos_gallai_violation(degrees).has_value();
}

bool is_graphical_histogram(std::span<const std::int64_t> hist) {
  const auto top = static_cast<std::int64_t>(hist.size()) - 1;
  if (top < 0) return true;
  // count_le[t] and weight_le[t]: # vertices and degree mass with degree <= t
  std::vector<std::int64_t> count_le(hist.size()), weight_le(hist.size());
  std::int64_t c = 0, w = 0;
  for (std::int64_t t = 0; t <= top; ++t) {
    if (hist[t] < 0) return false;
    c += hist[t];
    w += t * hist[t];
    count_le[t] = c;
    weight_le[t] = w;
  }
  if (w % 2 != 0) return false;

  std::int64_t k = 0;
  std::int64_t prefix = 0;
  for (std::int64_t x = top; x >= 0; --x) {
    if (hist[x] == 0) continue;
    k += hist[x];
    prefix += x * hist[x];
    // remaining vertices all have degree < x
    std::int64_t tail = 0;
    if (x > 0) {
      const std::int64_t cap = std::min(x - 1, k);
      tail = weight_le[cap] + k * (count_le[x - 1] - count_le[cap]);
    }
    if (prefix > k * (k - 1) + tail) return false;
  }
  return true;
}

bool is_bigraphical_histogram(std::span<const std::int64_t> row_hist,
                              std::span<const std::int64_t> col_hist) {
  const auto col_top = static_cast<std::int64_t>(col_hist.size()) - 1;
  std::vector<std::int64_t> count_le(col_hist.size()), weight_le(col_hist.size());
  std::int64_t c = 0, w = 0;
  for (std::int64_t t = 0; t <= col_top; ++t) {
    if (col_hist[t] < 0) return false;
    c += col_hist[t];
    w += t * col_hist[t];
    count_le[t] = c;
    weight_le[t] = w;
  }
  const std::int64_t col_count = c;
  const std::int64_t col_mass = w;

  std::int64_t row_mass = 0;
  for (std::size_t x = 0; x < row_hist.size(); ++x) {
    if (row_hist[x] < 0) return false;
    row_mass += static_cast<std::int64_t>(x) * row_hist[x];
  }
  if (row_mass != col_mass) return false;
  if (row_mass == 0) return true;

  auto capacity = [&](std::int64_t k) {
    if (col_top < 0) return std::int64_t{0};
    const std::int64_t cap = std::min(k, col_top);
    return weight_le[cap] + k * (col_count - count_le[cap]);
  };

  std::int64_t k = 0;
  std::int64_t prefix = 0;
  for (auto x = static_cast<std::int64_t>(row_hist.size()) - 1; x >= 1; --x) {
    if (row_hist[x] == 0) continue;
    k += row_hist[x];
    prefix += x * row_hist[x];
    if (prefix > capacity(k)) return false;
  }
  return true;
}

bool is_bigraphical(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols) {
  auto histogram = [](std::span<const std::int64_t> xs) {
    std::int64_t top = 0;
    for (auto x : xs) {
      if (x < 0) return std::vector<std::int64_t>{-1};
      top = std::max(top, x);
    }
    std::vector<std::int64_t> h(static_cast<std::size_t>(top) + 1, 0);
    for (auto x : xs) ++h[x];
    return h;
  };
  const auto rh = histogram(rows);
  const auto ch = histogram(cols);
  // a row needing more columns than exist is caught by the capacity bound
  return is_bigraphical_histogram(rh, ch);
}

std::vector<std::pair<std::int32_t, std::int32_t>> havel_hakimi(
    std::span<const std::int64_t> degrees) {
  if (auto bad = erdos_gallai_violation(degrees)) {
    throw DomainError("degree sequence is not graphical (Erdős–Gallai fails at k=" +
                      std::to_string(*bad) + ")");
  }
  const auto n = static_cast<std::int32_t>(degrees.size());
  std::vector<std::int64_t> residual(degrees.begin(), degrees.end());
  std::vector<std::int32_t> order(static_cast<std::size_t>(n));
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return residual[a] > residual[b]; });
    const auto hub = order[0];
    const auto need = residual[hub];
    if (need == 0) break;
    residual[hub] = 0;
    for (std::int64_t t = 1; t <= need; ++t) {
      const auto v = order[static_cast<std::size_t>(t)];
      --residual[v];
      edges.emplace_back(std::min(hub, v), std::max(hub, v));
    }
  }
  return edges;
}

}  // namespace ccmsel
