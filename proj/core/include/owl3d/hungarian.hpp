#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace owl3d::eval {

enum class Objective { kMinimize, kMaximize };

// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  // (row, col) pairs sorted by row; min(rows, cols) of them.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  // Sum of the original entries over `pairs`, accumulated in row order.
  double total = 0.0;
};

// Optimal one-to-one assignment (shortest augmenting path with potentials,
// O(n^2 m)). Rectangular inputs assign every row of the smaller side. Throws
// std::invalid_argument on a non-finite entry.
Assignment hungarian(const CostMatrix& cost, Objective objective = Objective::kMinimize);

}  // namespace owl3d::eval
