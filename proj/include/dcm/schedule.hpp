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
#include <utility>
#include <vector>

namespace dcm {

/// Which sites ship their raw columns to which. Site k receives the data of
/// every site in predecessors[k], nearest predecessor first.
struct Schedule {
  std::size_t t = 0;
  /// t = 2r (even) or t = 2r + 1 (odd).
  std::size_t r = 0;
  std::vector<std::vector<std::size_t>> predecessors;

  /// Sites that list `site` as a predecessor, ascending.
  std::vector<std::size_t> successors(std::size_t site) const;
  /// Number of directed data transfers, sum of all list lengths.
  std::size_t transfer_count() const noexcept;
};

/// Ring predecessor: t - 1 for site 0, k - 1 otherwise.
/// Throws IndexOutOfRange unless 0 <= k < t and t >= 2.
std::size_t predecessor(std::size_t k, std::size_t t);

/// Throws InvalidArgument for t == 0.
Schedule build_schedule(std::size_t t);

using SitePair = std::pair<std::size_t, std::size_t>;

struct CoverageReport {
  std::size_t pairs_expected = 0;
  /// Distinct unordered pairs covered at least once.
  std::size_t pairs_covered = 0;
  std::vector<SitePair> duplicates;
  std::vector<SitePair> gaps;
  /// Entries naming the site itself or a site >= t.
  std::vector<SitePair> invalid_entries;
  std::size_t max_list_length = 0;
  bool valid = false;
};

CoverageReport validate_schedule(const Schedule& s);

}  // namespace dcm
