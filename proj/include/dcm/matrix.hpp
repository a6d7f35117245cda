/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dcm {

using Labels = std::vector<std::string>;

/// Row-major table of finite binary64 values with optional unique column labels.
///
/// Construction validates shape, finiteness and label uniqueness. Mutable
/// element access exists for builders (covariance assembly, decoding); a
/// matrix handed to another thread is treated as read-only.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Throws DimensionMismatch, NonFiniteValue or DuplicateLabel.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
              std::optional<Labels> labels = std::nullopt);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }

  /// Copy of column `c`, ascending row order.
  std::vector<double> column(std::size_t c) const;

  const std::optional<Labels>& labels() const noexcept { return labels_; }
  void set_labels(std::optional<Labels> labels);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::optional<Labels> labels_;
};

/// Arithmetic mean of a column, summed in ascending row order.
/// Throws IndexOutOfRange or EmptyMatrix.
double column_mean(const DenseMatrix& m, std::size_t col);

/// Selected columns in the given order. Throws IndexOutOfRange or DuplicateIndex.
DenseMatrix column_slice(const DenseMatrix& m, std::span<const std::size_t> cols);

/// Same shape and bit-identical values (labels ignored).
bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) noexcept;

}  // namespace dcm
