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

#include "dcm/eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "dcm/error.hpp"

namespace dcm {

double frobenius_norm(const DenseMatrix& a) noexcept {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum);
}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) sum += a[i * n + j] * a[i * n + j];
    }
  }
  return std::sqrt(sum);
}

struct Rotation {
  std::size_t p;
  std::size_t q;
  double c;
  double s;
  double t;
  double apq;
};

Rotation plan_rotation(const std::vector<double>& a, std::size_t n, std::size_t p, std::size_t q) {
  const double apq = a[p * n + q];
  const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  return Rotation{p, q, c, t * c, t, apq};
}

// Rows p and q of `m` become c*p - s*q and s*p + c*q.
void rotate_rows(std::vector<double>& m, std::size_t n, const Rotation& r) {
  double* rp = m.data() + r.p * n;
  double* rq = m.data() + r.q * n;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = rp[k];
    const double y = rq[k];
    rp[k] = r.c * x - r.s * y;
    rq[k] = r.s * x + r.c * y;
  }
}

// Applies one round of disjoint rotations: A <- J^T A J, V <- V J.
// The pairs touch distinct rows and columns, so the left factor is applied
// row by row and the right factor within each row, both contiguous.
void apply_round(std::vector<double>& a, std::vector<double>& vt, std::size_t n,
                 const std::vector<Rotation>& round) {
  std::vector<std::array<double, 2>> diag;
  diag.reserve(round.size());
  for (const auto& r : round) {
    diag.push_back({a[r.p * n + r.p] - r.t * r.apq, a[r.q * n + r.q] + r.t * r.apq});
  }
  for (const auto& r : round) rotate_rows(a, n, r);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = a.data() + i * n;
    for (const auto& r : round) {
      const double x = row[r.p];
      const double y = row[r.q];
      row[r.p] = r.c * x - r.s * y;
      row[r.q] = r.s * x + r.c * y;
    }
  }
  for (std::size_t i = 0; i < round.size(); ++i) {
    const auto& r = round[i];
    a[r.p * n + r.p] = diag[i][0];
    a[r.q * n + r.q] = diag[i][1];
    a[r.p * n + r.q] = 0.0;
    a[r.q * n + r.p] = 0.0;
  }
  for (const auto& r : round) rotate_rows(vt, n, r);
}

// One sweep visits every pair (p, q) once, in round-robin order: n - 1
// rounds (n rounds when n is odd) of disjoint pairs.
void sweep(std::vector<double>& a, std::vector<double>& vt, std::size_t n) {
  const std::size_t players = n + (n % 2);
  std::vector<std::size_t> seat(players);
  std::iota(seat.begin(), seat.end(), 0);
  std::vector<Rotation> round;
  for (std::size_t k = 0; k + 1 < players; ++k) {
    round.clear();
    for (std::size_t i = 0; i < players / 2; ++i) {
      std::size_t p = seat[i];
      std::size_t q = seat[players - 1 - i];
      if (p >= n || q >= n) continue;
      if (p > q) std::swap(p, q);
      if (a[p * n + q] != 0.0) round.push_back(plan_rotation(a, n, p, q));
    }
    if (!round.empty()) apply_round(a, vt, n, round);
    std::rotate(seat.begin() + 1, seat.end() - 1, seat.end());
  }
}

}  // namespace

EigenDecomposition symmetric_eigen(const DenseMatrix& input, const JacobiSettings& settings) {
  const std::size_t n = input.rows();
  if (input.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "eigen-decomposition of a " + std::to_string(n) + "x" +
                                           std::to_string(input.cols()) + " matrix");
  }
  if (n == 0) fail(ErrorCode::EmptyMatrix, "eigen-decomposition of a 0x0 matrix");

  std::vector<double> a(input.values().begin(), input.values().end());
  std::vector<double> vt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;

  const double target = settings.tolerance * frobenius_norm(input);
  int sweeps = 0;
  while (off_diagonal_norm(a, n) > target) {
    if (sweeps == settings.max_sweeps) {
      fail(ErrorCode::NonConvergence, "off-diagonal norm above threshold after " +
                                          std::to_string(sweeps) + " sweeps");
    }
    ++sweeps;
    sweep(a, vt, n);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  EigenDecomposition out;
  out.eigenvalues.reserve(n);
  out.eigenvectors = DenseMatrix::zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    out.eigenvalues.push_back(a[src * n + src]);

    const double* v = vt.data() + src * n;
    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(v[k]) > std::abs(v[lead])) lead = k;
    }
    const double sign = v[lead] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, i) = sign * v[k];
  }
  return out;
}

}  // namespace dcm
