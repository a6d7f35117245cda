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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dcm/costmodel.hpp"
#include "dcm/matrix.hpp"
#include "dcm/runtime.hpp"
#include "dcm/schedule.hpp"

namespace dcm {

inline constexpr int kReportVersion = 1;

/// Lowercase hex SHA-256 of the row-major little-endian binary64 encoding.
std::string matrix_checksum(const DenseMatrix& m);

/// "DCMM" | u32 dim | u64 reserved (0) | dim*dim binary64 LE row-major.
/// Throws DimensionMismatch for a non-square matrix, IoError on write failure.
void dump_matrix(const DenseMatrix& m, const std::filesystem::path& path);
/// Throws IoError or MalformedFrame.
DenseMatrix read_matrix_dump(const std::filesystem::path& path);

std::string to_string(TransportKind kind);

enum class RunMode { Centralized, Distributed };
std::string to_string(RunMode mode);

struct ReportContext {
  RunMode mode = RunMode::Distributed;
  TransportKind transport = TransportKind::InProcess;
  std::vector<std::string> site_names;
};

/// JSON run report (report_version 1). The schedule echoed is
/// build_schedule(partitions).
std::string run_report_json(const RunResult& result, const ReportContext& ctx,
                            std::size_t partitions);

/// Per-site predecessor lists plus the coverage verdict.
std::string schedule_json(const Schedule& s, const CoverageReport& report);
/// Human-readable rendering of the same.
std::string schedule_text(const Schedule& s, const CoverageReport& report);

std::string cost_report_json(const CostReport& report, std::span<const std::size_t> widths);

struct Comparison {
  bool equal = false;
  std::size_t partitions = 0;
  std::string centralized_checksum;
  std::string distributed_checksum;
  double centralized_ms = 0.0;
  double distributed_ms = 0.0;
  CostReport cost;
  std::string json;
};

/// Runs both modes over the same blocks (schedule = build_schedule(t)) and
/// compares the covariance matrices bit for bit. Only the distributed run
/// computes eigenvalues. Never throws Mismatch; callers inspect `equal`.
Comparison compare_modes(std::span<const ColumnBlock> blocks, const RunOptions& options,
                         const std::vector<std::string>& site_names = {});

}  // namespace dcm
