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

#include "dcm/matrix.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "dcm/error.hpp"

namespace dcm {

namespace {

void check_labels(const std::optional<Labels>& labels, std::size_t cols) {
  if (!labels) return;
  if (labels->size() != cols) {
    fail(ErrorCode::DimensionMismatch,
         "label count " + std::to_string(labels->size()) + " != cols " + std::to_string(cols));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : *labels) {
    if (!seen.insert(l).second) fail(ErrorCode::DuplicateLabel, "label '" + l + "'");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                         std::optional<Labels> labels)
    : rows_(rows), cols_(cols), values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.size() != rows_ * cols_) {
    fail(ErrorCode::DimensionMismatch, std::to_string(values_.size()) + " values for a " +
                                           std::to_string(rows_) + "x" + std::to_string(cols_) +
                                           " matrix");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      fail(ErrorCode::NonFiniteValue, "at row " + std::to_string(i / (cols_ ? cols_ : 1)) +
                                          ", col " + std::to_string(cols_ ? i % cols_ : 0));
    }
  }
  check_labels(labels_, cols_);
}

DenseMatrix DenseMatrix::zeros(std::size_t rows, std::size_t cols) {
  DenseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.values_.assign(rows * cols, 0.0);
  return m;
}

std::vector<double> DenseMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = values_[r * cols_ + c];
  return out;
}

void DenseMatrix::set_labels(std::optional<Labels> labels) {
  check_labels(labels, cols_);
  labels_ = std::move(labels);
}

double column_mean(const DenseMatrix& m, std::size_t col) {
  if (col >= m.cols()) {
    fail(ErrorCode::IndexOutOfRange,
         "column " + std::to_string(col) + " of " + std::to_string(m.cols()));
  }
  if (m.rows() == 0) fail(ErrorCode::EmptyMatrix, "mean of a column with no rows");
  double sum = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, col);
  return sum / static_cast<double>(m.rows());
}

DenseMatrix column_slice(const DenseMatrix& m, std::span<const std::size_t> cols) {
  std::vector<bool> used(m.cols(), false);
  for (std::size_t c : cols) {
    if (c >= m.cols()) {
      fail(ErrorCode::IndexOutOfRange,
           "column " + std::to_string(c) + " of " + std::to_string(m.cols()));
    }
    if (used[c]) fail(ErrorCode::DuplicateIndex, "column " + std::to_string(c));
    used[c] = true;
  }

  DenseMatrix out = DenseMatrix::zeros(m.rows(), cols.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = m(r, cols[j]);
  }
  if (m.labels()) {
    Labels picked;
    picked.reserve(cols.size());
    for (std::size_t c : cols) picked.push_back((*m.labels())[c]);
    out.set_labels(std::move(picked));
  }
  return out;
}

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) noexcept {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.values().empty()) return true;
  return std::memcmp(a.values().data(), b.values().data(), a.values().size_bytes()) == 0;
}

}  // namespace dcm
