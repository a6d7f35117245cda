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

#include <vector>

#include "dcm/covariance.hpp"
#include "dcm/matrix.hpp"

namespace dcm {

struct EigenDecomposition {
  /// Descending.
  std::vector<double> eigenvalues;
  /// Column i is the unit eigenvector for eigenvalues[i]. Its largest-magnitude
  /// component is positive (first such index on ties).
  DenseMatrix eigenvectors;
};

struct JacobiSettings {
  /// Stop once the off-diagonal Frobenius norm is <= tolerance * ||A||_F.
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Throws NonConvergence when the sweep cap is reached, DimensionMismatch for a
/// non-square input and EmptyMatrix for a 0 x 0 input.
EigenDecomposition symmetric_eigen(const DenseMatrix& a, const JacobiSettings& settings = {});

inline EigenDecomposition symmetric_eigen(const GlobalCovariance& a,
                                          const JacobiSettings& settings = {}) {
  return symmetric_eigen(a.matrix, settings);
}

double frobenius_norm(const DenseMatrix& a) noexcept;

}  // namespace dcm
