#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ccmsel {

/// First 1-based index k at which the Erdős–Gallai inequality fails for the
/// nonincreasing rearrangement of `degrees`; 0 reports an odd degree sum;
/// nullopt means the sequence is graphical.
std::optional<std::int64_t> erdos_gallai_violation(std::span<const std::int64_t> degrees);

bool is_graphical(std::span<const std::int64_t> degrees);

/// Graphicality from a degree histogram hist[d] = #vertices of degree d.
/// Checks only the group boundaries of the sorted sequence, O(max degree).
bool is_graphical_histogram(std::span<const std::int64_t> hist);

/// Gale–Ryser: a bipartite simple graph with these side degrees exists.
bool is_bigraphical(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols);

/// Histogram form of Gale–Ryser.
bool is_bigraphical_histogram(std::span<const std::int64_t> row_hist,
                              std::span<const std::int64_t> col_hist);

/// Havel–Hakimi realization; throws DomainError if not graphical.
std::vector<std::pair<std::int32_t, std::int32_t>> havel_hakimi(
    std::span<const std::int64_t> degrees);

}  // namespace ccmsel
