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

#include "dcm/covariance.hpp"

#include <string>

#include "dcm/error.hpp"

namespace dcm {

namespace {

// Column-major copy of (x - mean) for every column. The kernels below only
// ever combine these with a sequential, ascending-row sum, which makes every
// covariance entry a function of its two columns alone.
class CenteredColumns {
 public:
  explicit CenteredColumns(const DenseMatrix& m) : rows_(m.rows()), cols_(m.cols()) {
    data_.resize(rows_ * cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
      const double mean = column_mean(m, c);
      double* out = data_.data() + c * rows_;
      for (std::size_t r = 0; r < rows_; ++r) out[r] = m(r, c) - mean;
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const double* col(std::size_t c) const noexcept { return data_.data() + c * rows_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// out[k] = sum_i a[i] * B.col(first + k)[i] / (n - 1) for k in [0, count).
// Four independent accumulators run side by side; each one is still a
// strictly sequential sum, so the result per entry is unchanged.
void covariance_row(const double* a, const CenteredColumns& b, std::size_t first,
                    std::size_t count, double* out) {
  const std::size_t n = b.rows();
  const double denom = static_cast<double>(n - 1);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const double* b0 = b.col(first + k);
    const double* b1 = b.col(first + k + 1);
    const double* b2 = b.col(first + k + 2);
    const double* b3 = b.col(first + k + 3);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = a[i];
      s0 += ai * b0[i];
      s1 += ai * b1[i];
      s2 += ai * b2[i];
      s3 += ai * b3[i];
    }
    out[k] = s0 / denom;
    out[k + 1] = s1 / denom;
    out[k + 2] = s2 / denom;
    out[k + 3] = s3 / denom;
  }
  for (; k < count; ++k) {
    const double* bk = b.col(first + k);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * bk[i];
    out[k] = s / denom;
  }
}

void require_rows(std::size_t n) {
  if (n < 2) {
    fail(ErrorCode::TooFewRows,
         "sample covariance needs at least 2 rows, got " + std::to_string(n));
  }
}

// Upper triangle of the covariance of all columns of `centered`, mirrored.
DenseMatrix symmetric_covariance(const CenteredColumns& centered) {
  const std::size_t k = centered.cols();
  DenseMatrix out = DenseMatrix::zeros(k, k);
  std::vector<double> row(k);
  for (std::size_t p = 0; p < k; ++p) {
    covariance_row(centered.col(p), centered, p, k - p, row.data());
    for (std::size_t q = p; q < k; ++q) {
      out(p, q) = row[q - p];
      out(q, p) = row[q - p];
    }
  }
  return out;
}

}  // namespace

void validate_block(const ColumnBlock& b) {
  if (b.data.cols() != b.global_cols.size()) {
    fail(ErrorCode::DimensionMismatch,
         "site " + std::to_string(b.site) + " has " + std::to_string(b.data.cols()) +
             " columns but " + std::to_string(b.global_cols.size()) + " global indices");
  }
  for (std::size_t i = 1; i < b.global_cols.size(); ++i) {
    if (b.global_cols[i] <= b.global_cols[i - 1]) {
      fail(ErrorCode::InvalidArgument,
           "site " + std::to_string(b.site) + " global columns are not strictly increasing");
    }
  }
}

double covariance_pair(std::span<const double> x, std::span<const double> y, double mean_x,
                       double mean_y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch,
         std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
  }
  require_rows(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - mean_x) * (y[i] - mean_y);
  return sum / static_cast<double>(x.size() - 1);
}

CovBlock local_covariance(const ColumnBlock& b) {
  validate_block(b);
  require_rows(b.data.rows());
  return CovBlock{b.site, b.site, symmetric_covariance(CenteredColumns(b.data)), b.global_cols,
                  b.global_cols};
}

CovBlock cross_covariance(const ColumnBlock& receiver, const ColumnBlock& sender) {
  validate_block(receiver);
  validate_block(sender);
  if (receiver.site == sender.site) {
    fail(ErrorCode::SameSite, "cross covariance of site " + std::to_string(sender.site) +
                                  " with itself");
  }
  if (receiver.data.rows() != sender.data.rows()) {
    fail(ErrorCode::RowCountMismatch, "sender has " + std::to_string(sender.data.rows()) +
                                          " rows, receiver " +
                                          std::to_string(receiver.data.rows()));
  }
  require_rows(receiver.data.rows());

  const CenteredColumns s(sender.data);
  const CenteredColumns r(receiver.data);
  DenseMatrix block = DenseMatrix::zeros(s.cols(), r.cols());
  for (std::size_t u = 0; u < s.cols(); ++u) {
    covariance_row(s.col(u), r, 0, r.cols(), block.values().data() + u * r.cols());
  }
  return CovBlock{sender.site, receiver.site, std::move(block), sender.global_cols,
                  receiver.global_cols};
}

GlobalCovariance centralized_covariance(const DenseMatrix& m) {
  require_rows(m.rows());
  if (m.cols() == 0) fail(ErrorCode::EmptyMatrix, "covariance of a matrix with no columns");
  return GlobalCovariance{symmetric_covariance(CenteredColumns(m)), m.labels()};
}

GlobalCovariance merge_blocks(std::span<const CovBlock> locals, std::span<const CovBlock> crosses,
                              std::size_t total_cols) {
  const std::size_t m = total_cols;
  // coverage[i * m + j] for i <= j
  std::vector<std::uint8_t> coverage(m * m, 0);

  auto check_shape = [&](const CovBlock& b) {
    if (b.block.rows() != b.rows_global_cols.size() ||
        b.block.cols() != b.cols_global_cols.size()) {
      fail(ErrorCode::DimensionMismatch, "block (" + std::to_string(b.site_a) + "," +
                                             std::to_string(b.site_b) +
                                             ") shape disagrees with its global indices");
    }
    for (std::size_t g : b.rows_global_cols) {
      if (g >= m) fail(ErrorCode::DimensionMismatch, "global column " + std::to_string(g));
    }
    for (std::size_t g : b.cols_global_cols) {
      if (g >= m) fail(ErrorCode::DimensionMismatch, "global column " + std::to_string(g));
    }
  };
  auto cover = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    auto& c = coverage[i * m + j];
    if (c < 2) ++c;
  };

  for (const auto& b : locals) {
    check_shape(b);
    if (b.site_a != b.site_b || b.rows_global_cols != b.cols_global_cols) {
      fail(ErrorCode::DimensionMismatch,
           "local block of site " + std::to_string(b.site_a) + " is not a diagonal block");
    }
    const auto& g = b.rows_global_cols;
    for (std::size_t u = 0; u < g.size(); ++u) {
      for (std::size_t v = u; v < g.size(); ++v) cover(g[u], g[v]);
    }
  }
  for (const auto& b : crosses) {
    check_shape(b);
    if (b.site_a == b.site_b) {
      fail(ErrorCode::DimensionMismatch,
           "cross block pairs site " + std::to_string(b.site_a) + " with itself");
    }
    for (std::size_t gr : b.rows_global_cols) {
      for (std::size_t gc : b.cols_global_cols) {
        if (gr == gc) {
          fail(ErrorCode::DimensionMismatch,
               "cross block relates column " + std::to_string(gr) + " to itself");
        }
        cover(gr, gc);
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const auto c = coverage[i * m + j];
      const std::string pair = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (c == 0) fail(ErrorCode::MissingPair, "column pair " + pair + " is not covered");
      if (c > 1) fail(ErrorCode::OverlappingPair, "column pair " + pair + " is covered twice");
    }
  }

  DenseMatrix out = DenseMatrix::zeros(m, m);
  auto place = [&](const CovBlock& b) {
    for (std::size_t u = 0; u < b.rows_global_cols.size(); ++u) {
      for (std::size_t v = 0; v < b.cols_global_cols.size(); ++v) {
        const double value = b.block(u, v);
        out(b.rows_global_cols[u], b.cols_global_cols[v]) = value;
        out(b.cols_global_cols[v], b.rows_global_cols[u]) = value;
      }
    }
  };
  for (const auto& b : locals) place(b);
  for (const auto& b : crosses) place(b);
  return GlobalCovariance{std::move(out), std::nullopt};
}

}  // namespace dcm
