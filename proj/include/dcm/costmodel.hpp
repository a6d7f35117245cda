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
#include <span>
#include <vector>

#include "dcm/schedule.hpp"

namespace dcm {

/// Modeled cost in column-pair covariance evaluations.
struct CostReport {
  std::uint64_t t_c = 0;
  /// m_j (m_j - 1) / 2 per site, and its maximum.
  std::vector<std::uint64_t> t_l_per_site;
  std::uint64_t t_l = 0;
  /// sum over predecessors i of site k of (m_k * m_i + m_i), and its maximum.
  std::vector<std::uint64_t> t_cr_cm_per_site;
  std::uint64_t t_cr_cm = 0;
  std::uint64_t t_d = 0;
  /// t_c / t_d; 1 when both are zero.
  double speedup = 0.0;
};

/// m (m - 1) / 2.
std::uint64_t centralized_cost(std::uint64_t m) noexcept;

/// Throws WidthMismatch when widths.size() != schedule.t or a width is 0.
CostReport distributed_cost(std::span<const std::size_t> widths, const Schedule& schedule);

/// Modeled speed-up for t sites of `gamma` columns each.
/// Throws InvalidArgument unless t >= 2 and gamma >= 2.
double speedup_lower_bound(std::size_t t, std::size_t gamma);

}  // namespace dcm
