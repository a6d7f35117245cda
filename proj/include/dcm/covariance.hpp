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
#include <vector>

#include "dcm/matrix.hpp"

namespace dcm {

using SiteId = std::size_t;

/// One site's vertical slice: every row, a subset of the columns.
struct ColumnBlock {
  SiteId site = 0;
  DenseMatrix data;
  /// Position of each local column in the full matrix; strictly increasing.
  std::vector<std::size_t> global_cols;
};

/// Covariance sub-matrix between the columns of `site_a` (rows) and
/// `site_b` (columns). A local block has site_a == site_b.
struct CovBlock {
  SiteId site_a = 0;
  SiteId site_b = 0;
  DenseMatrix block;
  std::vector<std::size_t> rows_global_cols;
  std::vector<std::size_t> cols_global_cols;
};

/// Full m x m sample covariance. Exactly symmetric, non-negative diagonal.
struct GlobalCovariance {
  DenseMatrix matrix;
  std::optional<Labels> labels;

  std::size_t dim() const noexcept { return matrix.rows(); }
};

/// Throws DimensionMismatch when data.cols != global_cols.size(), or
/// InvalidArgument when global_cols is not strictly increasing.
void validate_block(const ColumnBlock& b);

/// Sample covariance with denominator n-1, products summed in ascending row
/// order. Throws LengthMismatch or TooFewRows.
double covariance_pair(std::span<const double> x, std::span<const double> y, double mean_x,
                       double mean_y);

/// C_jj of one site: upper triangle computed, then mirrored. Throws TooFewRows.
CovBlock local_covariance(const ColumnBlock& b);

/// C_jk computed at the receiver from the sender's raw columns.
/// Orientation: sender columns as rows, receiver columns as columns.
/// Throws RowCountMismatch, SameSite or TooFewRows.
CovBlock cross_covariance(const ColumnBlock& receiver, const ColumnBlock& sender);

/// Direct single-matrix computation; the oracle for every equivalence check.
GlobalCovariance centralized_covariance(const DenseMatrix& m);

/// Assembles the global matrix from local and cross blocks.
///
/// Coverage is validated before any entry is written: every column must sit
/// in exactly one local block and every unordered pair of distinct columns
/// must be covered exactly once. Throws MissingPair, OverlappingPair or
/// DimensionMismatch.
GlobalCovariance merge_blocks(std::span<const CovBlock> locals, std::span<const CovBlock> crosses,
                              std::size_t total_cols);

}  // namespace dcm
