// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cfred {

/// Row-major embedding matrix, one sample per row. Values are stored as
/// 32-bit floats and widened to double for every computation.
///
/// Invariants: rows >= 1, cols >= 1, every value finite. The constructor
/// throws DataError naming the first offending row/col.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);
  FeatureMatrix(std::initializer_list<std::initializer_list<float>> rows);

  static FeatureMatrix from_eigen(const Eigen::MatrixXd& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  float operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  Eigen::MatrixXd to_eigen() const;
  Eigen::VectorXd row_eigen(std::size_t r) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<float> data_;
};

}  // namespace cfred
