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

#include "dcm/costmodel.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dcm/error.hpp"

namespace dcm {

std::uint64_t centralized_cost(std::uint64_t m) noexcept { return m * (m - (m > 0 ? 1 : 0)) / 2; }

CostReport distributed_cost(std::span<const std::size_t> widths, const Schedule& schedule) {
  if (widths.size() != schedule.t || schedule.predecessors.size() != schedule.t) {
    fail(ErrorCode::WidthMismatch, std::to_string(widths.size()) + " widths for " +
                                       std::to_string(schedule.t) + " sites");
  }
  for (std::size_t j = 0; j < widths.size(); ++j) {
    if (widths[j] == 0) fail(ErrorCode::WidthMismatch, "site " + std::to_string(j) + " has width 0");
  }

  CostReport report;
  const std::uint64_t m = std::accumulate(widths.begin(), widths.end(), std::uint64_t{0});
  report.t_c = centralized_cost(m);

  for (std::size_t k = 0; k < widths.size(); ++k) {
    const std::uint64_t mk = widths[k];
    report.t_l_per_site.push_back(centralized_cost(mk));

    std::uint64_t cross = 0;
    for (std::size_t i : schedule.predecessors[k]) {
      if (i >= widths.size()) {
        fail(ErrorCode::WidthMismatch, "predecessor " + std::to_string(i) + " has no width");
      }
      const std::uint64_t mi = widths[i];
      cross += mk * mi + mi;
    }
    report.t_cr_cm_per_site.push_back(cross);
  }
  report.t_l = *std::max_element(report.t_l_per_site.begin(), report.t_l_per_site.end());
  report.t_cr_cm =
      *std::max_element(report.t_cr_cm_per_site.begin(), report.t_cr_cm_per_site.end());
  report.t_d = report.t_l + report.t_cr_cm;
  report.speedup = report.t_d == 0 ? 1.0
                                   : static_cast<double>(report.t_c) /
                                         static_cast<double>(report.t_d);
  return report;
}

double speedup_lower_bound(std::size_t t, std::size_t gamma) {
  if (t < 2 || gamma < 2) {
    fail(ErrorCode::InvalidArgument, "needs t >= 2 and gamma >= 2, got t=" + std::to_string(t) +
                                         ", gamma=" + std::to_string(gamma));
  }
  const std::vector<std::size_t> widths(t, gamma);
  return distributed_cost(widths, build_schedule(t)).speedup;
}

}  // namespace dcm
