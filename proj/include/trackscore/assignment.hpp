#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "trackscore/matrix.hpp"

namespace trackscore {

// Cells holding this value can never be paired.
inline constexpr double kIneligible = -std::numeric_limits<double>::infinity();

using ScoreMatrix = Matrix<double>;

struct Assignment {
  // (row, column) pairs sorted by row.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double objective = 0.0;
};

/// Optimal bijective pairing over the eligible cells of a rectangular matrix.
///
/// The pairing first maximises the number of pairs and then, among all
/// pairings of that size, the total score. Cardinality is compared as an exact
/// integer, so no score magnitude can trade a pair away. With every cell
/// eligible this is the classic maximum-weight assignment of min(rows, cols)
/// pairs.
///
/// Runs the shortest-augmenting-path Hungarian method in O(n^2 m). Ties are
/// resolved by a fixed scan order (lower row first, then lower column when an
/// augmenting path is chosen), so identical input always gives identical output.
///
/// Throws ContractViolation on NaN or +inf entries.
Assignment solve_max(const ScoreMatrix& score);

}  // namespace trackscore
