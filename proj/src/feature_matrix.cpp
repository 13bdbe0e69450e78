// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/feature_matrix.hpp"

#include <cmath>
#include <string>

#include "cfred/error.hpp"

namespace cfred {

namespace {

std::vector<float> flatten(
    std::initializer_list<std::initializer_list<float>> rows) {
  std::vector<float> out;
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != cols) {
      throw DimensionError("ragged initializer: every row needs " +
                           std::to_string(cols) + " values");
    }
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) {
    throw DegenerateInputError("feature matrix must have at least one row and "
                               "one column (got " +
                               std::to_string(rows_) + "x" +
                               std::to_string(cols_) + ")");
  }
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("feature matrix payload has " +
                         std::to_string(data_.size()) + " values, expected " +
                         std::to_string(rows_ * cols_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw DataError("non-finite value at row " + std::to_string(i / cols_) +
                      ", col " + std::to_string(i % cols_));
    }
  }
}

FeatureMatrix::FeatureMatrix(
    std::initializer_list<std::initializer_list<float>> rows)
    : FeatureMatrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size(),
                    flatten(rows)) {}

FeatureMatrix FeatureMatrix::from_eigen(const Eigen::MatrixXd& m) {
  std::vector<float> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data[static_cast<std::size_t>(r * m.cols() + c)] =
          static_cast<float>(m(r, c));
    }
  }
  return FeatureMatrix(static_cast<std::size_t>(m.rows()),
                       static_cast<std::size_t>(m.cols()), std::move(data));
}

Eigen::MatrixXd FeatureMatrix::to_eigen() const {
  using RowMajor =
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> view(data_.data(),
                                        static_cast<Eigen::Index>(rows_),
                                        static_cast<Eigen::Index>(cols_));
  return view.cast<double>();
}

Eigen::VectorXd FeatureMatrix::row_eigen(std::size_t r) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(cols_));
  for (std::size_t c = 0; c < cols_; ++c) {
    v(static_cast<Eigen::Index>(c)) = data_[r * cols_ + c];
  }
  return v;
}

}  // namespace cfred
