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
#include <cstdint>
#include <random>
#include <vector>

#include "dcm/covariance.hpp"
#include "dcm/ingest.hpp"
#include "dcm/matrix.hpp"

namespace dcm::testing {

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng) * 3.0 + 1.0;
  return DenseMatrix(rows, cols, std::move(v));
}

// Widths >= 1 summing to `cols`.
inline std::vector<std::size_t> random_widths(std::size_t cols, std::size_t t, std::mt19937_64& rng) {
  std::vector<std::size_t> widths(t, 1);
  std::uniform_int_distribution<std::size_t> pick(0, t - 1);
  for (std::size_t i = t; i < cols; ++i) ++widths[pick(rng)];
  return widths;
}

inline std::vector<ColumnBlock> split(const DenseMatrix& m, const std::vector<std::size_t>& widths) {
  return partition_vertical(m, contiguous_spec(widths));
}

// Straightforward long double sample covariance, used as an accuracy oracle.
inline std::vector<long double> naive_covariance(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t c = m.cols();
  std::vector<long double> mean(c, 0.0L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) mean[j] += m(i, j);
  for (auto& x : mean) x /= static_cast<long double>(n);
  std::vector<long double> cov(c * c, 0.0L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < c; ++a)
      for (std::size_t b = 0; b < c; ++b) cov[a * c + b] += (m(i, a) - mean[a]) * (m(i, b) - mean[b]);
  for (auto& x : cov) x /= static_cast<long double>(n - 1);
  return cov;
}

// The three-site layout {x, y | z, w | v} with five observations.
inline DenseMatrix three_site_data() {
  return DenseMatrix(5, 5,
                     {1.0, 2.0, 0.5, 3.0, -1.0,   //
                      2.0, 1.0, 1.5, 2.0, 0.0,    //
                      3.0, 4.0, 2.5, 0.0, 2.0,    //
                      4.0, 3.0, 0.5, 1.0, 1.0,    //
                      5.0, 5.0, 3.0, -1.0, 3.0},
                     Labels{"x", "y", "z", "w", "v"});
}

inline std::vector<std::size_t> three_site_widths() { return {2, 2, 1}; }

}  // namespace dcm::testing
