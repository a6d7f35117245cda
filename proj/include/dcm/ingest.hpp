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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcm/covariance.hpp"
#include "dcm/matrix.hpp"

namespace dcm {

enum class TableFormat { Csv, Whitespace };

/// Throws IoError, RaggedRows, ParseError or NonFiniteValue.
/// CSV: a first row containing any non-numeric field becomes the labels.
/// Whitespace: runs of spaces/tabs separate fields. Blank lines are skipped.
DenseMatrix load_table(const std::filesystem::path& path, TableFormat format);

/// Writes values with round-trip precision. Throws IoError.
void save_table(const DenseMatrix& m, const std::filesystem::path& path, TableFormat format);

/// Guesses the format from the extension: ".csv" is CSV, anything else is whitespace.
TableFormat format_for(const std::filesystem::path& path);

/// Column-wise concatenation in list order. Throws RowCountMismatch.
DenseMatrix hjoin(std::span<const DenseMatrix> tables);

struct PartitionGroup {
  std::size_t site = 0;
  std::vector<std::size_t> cols;
  std::string name;
};

struct PartitionSpec {
  std::size_t total_cols = 0;
  std::vector<PartitionGroup> groups;

  std::size_t sites() const noexcept { return groups.size(); }
  std::vector<std::size_t> widths() const;

  /// Throws SpecMismatch unless sites are 0..t-1 in order, each group's
  /// columns are strictly increasing, and the groups tile [0, total_cols).
  void validate() const;

  /// `{"total_cols": N, "groups": [{"site": i, "cols": [..], "name": ".."}]}`
  std::string to_json() const;
  /// Throws ParseError on malformed JSON, SpecMismatch on an invalid spec.
  static PartitionSpec from_json(const std::string& text);
};

/// Contiguous groups of the given widths, in order.
PartitionSpec contiguous_spec(std::span<const std::size_t> widths,
                              std::span<const std::string> names = {});

/// Throws SpecMismatch.
std::vector<ColumnBlock> partition_vertical(const DenseMatrix& m, const PartitionSpec& spec);

/// Column widths of the six Mfeat files in their global order:
/// fac 216, fou 76, kar 64, mor 6, pix 240, zer 47.
struct MfeatFile {
  const char* name;
  std::size_t width;
};
std::span<const MfeatFile> mfeat_files() noexcept;
constexpr std::size_t kMfeatColumns = 649;
constexpr std::size_t kMfeatRows = 2000;

/// Site layouts for 2..6 partitions. Throws UnsupportedPartitionCount.
PartitionSpec mfeat_preset(std::size_t partitions);

/// Seeded correlated Gaussian data (a few latent factors plus noise, per-column
/// scale and offset). Same seed, same bits.
DenseMatrix generate_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace dcm
