#include "trackscore/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "trackscore/error.hpp"

namespace trackscore {
namespace {

// Lexicographic cost (tier, value). The Hungarian method only needs an ordered
// abelian group, so potentials work component-wise.
struct TieredCost {
  std::int64_t tier = 0;
  double value = 0.0;

  friend TieredCost operator+(TieredCost a, TieredCost b) { return {a.tier + b.tier, a.value + b.value}; }
  friend TieredCost operator-(TieredCost a, TieredCost b) { return {a.tier - b.tier, a.value - b.value}; }
  TieredCost& operator+=(TieredCost o) { return *this = *this + o; }
  TieredCost& operator-=(TieredCost o) { return *this = *this - o; }
  friend bool operator<(TieredCost a, TieredCost b) {
    return a.tier != b.tier ? a.tier < b.tier : a.value < b.value;
  }
};

constexpr TieredCost kInfinity{std::numeric_limits<std::int64_t>::max() / 4, 0.0};

// Minimum-cost assignment of every row (rows <= cols). Returns col_of_row.
std::vector<std::size_t> hungarian(const Matrix<TieredCost>& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  std::vector<TieredCost> u(n + 1), v(m + 1), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInfinity);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      TieredCost delta = kInfinity;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const TieredCost cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
  return col_of_row;
}

}  // namespace

Assignment solve_max(const ScoreMatrix& score) {
  Assignment out;
  if (score.rows() == 0 || score.cols() == 0) return out;

  const bool transpose = score.rows() > score.cols();
  const std::size_t n = transpose ? score.cols() : score.rows();
  const std::size_t m = transpose ? score.rows() : score.cols();
  auto at = [&](std::size_t i, std::size_t j) { return transpose ? score(j, i) : score(i, j); };

  Matrix<TieredCost> cost(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double s = at(i, j);
      if (s == kIneligible) {
        cost(i, j) = {1, 0.0};
      } else if (!std::isfinite(s)) {
        throw ContractViolation("assignment scores must be finite or kIneligible");
      } else {
        cost(i, j) = {0, -s};
      }
    }
  }

  const auto col_of_row = hungarian(cost);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = col_of_row[i];
    if (at(i, j) == kIneligible) continue;
    out.pairs.emplace_back(transpose ? j : i, transpose ? i : j);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& [r, c] : out.pairs) out.objective += score(r, c);
  return out;
}

}  // namespace trackscore
