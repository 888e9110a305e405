#include "owl3d/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace owl3d::eval {

namespace {

// Rows <= cols. Returns col assigned to each row.
std::vector<std::size_t> solve_wide(const CostMatrix& c) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based with column 0 as the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
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
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost, Objective objective) {
  Assignment out;
  if (cost.empty()) return out;
  const bool transpose = cost.rows() > cost.cols();
  const std::size_t n = transpose ? cost.cols() : cost.rows();
  const std::size_t m = transpose ? cost.rows() : cost.cols();
  const double sign = objective == Objective::kMaximize ? -1.0 : 1.0;
  CostMatrix work(n, m);
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (std::size_t c = 0; c < cost.cols(); ++c) {
      const double v = cost(r, c);
      if (!std::isfinite(v)) throw std::invalid_argument("hungarian: non-finite cost entry");
      if (transpose) {
        work(c, r) = sign * v;
      } else {
        work(r, c) = sign * v;
      }
    }
  }
  const auto assigned = solve_wide(work);
  out.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (transpose) {
      out.pairs.emplace_back(assigned[i], i);
    } else {
      out.pairs.emplace_back(i, assigned[i]);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& [r, c] : out.pairs) out.total += cost(r, c);
  return out;
}

}  // namespace owl3d::eval
