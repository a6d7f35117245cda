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

#include "dcm/schedule.hpp"

#include <string>

#include "dcm/error.hpp"

namespace dcm {

std::vector<std::size_t> Schedule::successors(std::size_t site) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < predecessors.size(); ++k) {
    for (std::size_t p : predecessors[k]) {
      if (p == site) out.push_back(k);
    }
  }
  return out;
}

std::size_t Schedule::transfer_count() const noexcept {
  std::size_t n = 0;
  for (const auto& list : predecessors) n += list.size();
  return n;
}

std::size_t predecessor(std::size_t k, std::size_t t) {
  if (t < 2 || k >= t) {
    fail(ErrorCode::IndexOutOfRange,
         "predecessor of site " + std::to_string(k) + " in a ring of " + std::to_string(t));
  }
  return k == 0 ? t - 1 : k - 1;
}

Schedule build_schedule(std::size_t t) {
  if (t == 0) fail(ErrorCode::InvalidArgument, "schedule needs at least one site");

  Schedule s;
  s.t = t;
  s.r = t / 2;
  s.predecessors.resize(t);
  if (t == 1) return s;

  // Walk the ring backwards from k, `count` steps.
  auto walk = [&](std::size_t k, std::size_t count) {
    std::vector<std::size_t> list;
    std::size_t p = k;
    for (std::size_t i = 0; i < count; ++i) {
      p = predecessor(p, t);
      list.push_back(p);
    }
    return list;
  };

  const bool even = t % 2 == 0;
  for (std::size_t k = 0; k < t; ++k) {
    // Even rings: the first r sites take r - 1 predecessors, the rest take r.
    const std::size_t count = (even && k < s.r) ? s.r - 1 : s.r;
    s.predecessors[k] = walk(k, count);
  }
  return s;
}

CoverageReport validate_schedule(const Schedule& s) {
  CoverageReport report;
  const std::size_t t = s.t;
  report.pairs_expected = t * (t - (t > 0 ? 1 : 0)) / 2;

  std::vector<std::size_t> hits(t * t, 0);
  for (std::size_t k = 0; k < s.predecessors.size(); ++k) {
    const auto& list = s.predecessors[k];
    report.max_list_length = std::max(report.max_list_length, list.size());
    for (std::size_t p : list) {
      if (p == k || p >= t || k >= t) {
        report.invalid_entries.emplace_back(p, k);
        continue;
      }
      const std::size_t lo = std::min(p, k);
      const std::size_t hi = std::max(p, k);
      if (++hits[lo * t + hi] == 2) report.duplicates.emplace_back(lo, hi);
    }
  }
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i + 1; j < t; ++j) {
      if (hits[i * t + j] == 0) {
        report.gaps.emplace_back(i, j);
      } else {
        ++report.pairs_covered;
      }
    }
  }
  report.valid = s.predecessors.size() == t && report.duplicates.empty() &&
                 report.gaps.empty() && report.invalid_entries.empty() &&
                 report.max_list_length <= s.r;
  return report;
}

}  // namespace dcm
