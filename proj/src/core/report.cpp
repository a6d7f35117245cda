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

#include "dcm/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcm/error.hpp"

namespace dcm {

namespace {

using json = nlohmann::ordered_json;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> le_values(const DenseMatrix& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(m.values().size() * 8);
  for (double v : m.values()) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
  return bytes;
}

json schedule_doc(const Schedule& s, const CoverageReport& report) {
  json doc;
  doc["t"] = s.t;
  doc["r"] = s.r;
  doc["predecessors"] = s.predecessors;
  auto pairs = [](const std::vector<SitePair>& v) {
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back({x, y});
    return a;
  };
  doc["validation"] = {
      {"valid", report.valid},
      {"pairs_expected", report.pairs_expected},
      {"pairs_covered", report.pairs_covered},
      {"max_list_length", report.max_list_length},
      {"duplicates", pairs(report.duplicates)},
      {"gaps", pairs(report.gaps)},
      {"invalid_entries", pairs(report.invalid_entries)},
  };
  return doc;
}

json metrics_doc(const RunMetrics& m) {
  json doc;
  doc["total_ms"] = m.total_ms;
  doc["covariance_ms"] = m.covariance_ms;
  doc["covariance_cpu_ms"] = m.covariance_cpu_ms;
  doc["merge_ms"] = m.merge_ms;
  doc["eigen_ms"] = m.eigen_ms;
  doc["modeled_distributed_ms"] = m.modeled_distributed_ms();
  doc["messages"] = {{"data", m.data_messages}, {"cov", m.cov_messages}, {"done", m.done_messages}};
  doc["sites"] = json::array();
  for (const auto& s : m.sites) {
    doc["sites"].push_back({{"site", s.site},
                            {"local_ms", s.local_ms},
                            {"cross_ms", s.cross_ms},
                            {"local_cpu_ms", s.local_cpu_ms},
                            {"cross_cpu_ms", s.cross_cpu_ms},
                            {"cross_blocks", s.cross_blocks}});
  }
  doc["edges"] = json::array();
  for (const auto& e : m.edges) {
    doc["edges"].push_back({{"from", e.from},
                            {"to", e.to},
                            {"bytes", e.bytes},
                            {"wire_bytes", e.wire_bytes},
                            {"transfer_ms", e.transfer_ms}});
  }
  return doc;
}

json cost_doc(const CostReport& r, std::span<const std::size_t> widths) {
  json doc;
  doc["widths"] = std::vector<std::size_t>(widths.begin(), widths.end());
  doc["t_c"] = r.t_c;
  doc["t_l_per_site"] = r.t_l_per_site;
  doc["t_l"] = r.t_l;
  doc["t_cr_cm_per_site"] = r.t_cr_cm_per_site;
  doc["t_cr_cm"] = r.t_cr_cm;
  doc["t_d"] = r.t_d;
  doc["speedup"] = r.speedup;
  return doc;
}

json run_doc(const RunResult& result, const ReportContext& ctx, std::size_t partitions) {
  json doc;
  doc["report_version"] = kReportVersion;
  doc["mode"] = to_string(ctx.mode);
  doc["partitions"] = partitions;
  doc["transport"] = ctx.mode == RunMode::Distributed ? json(to_string(ctx.transport)) : json();
  doc["site_names"] = ctx.site_names;
  doc["matrix_dim"] = result.covariance.dim();
  doc["matrix_checksum"] = matrix_checksum(result.covariance.matrix);
  json top = json::array();
  if (result.eigen) {
    const auto& ev = result.eigen->eigenvalues;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ev.size()); ++i) top.push_back(ev[i]);
  }
  doc["top_eigenvalues"] = top;
  doc["metrics"] = metrics_doc(result.metrics);
  const Schedule s = build_schedule(partitions);
  doc["schedule"] = schedule_doc(s, validate_schedule(s));
  return doc;
}

}  // namespace

std::string matrix_checksum(const DenseMatrix& m) {
  const auto bytes = le_values(m);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

void dump_matrix(const DenseMatrix& m, const std::filesystem::path& path) {
  if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "matrix dump needs a square matrix");
  std::vector<std::uint8_t> bytes = {'D', 'C', 'M', 'M'};
  put_u32(bytes, static_cast<std::uint32_t>(m.rows()));
  put_u64(bytes, 0);
  const auto values = le_values(m);
  bytes.insert(bytes.end(), values.begin(), values.end());

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write error on '" + path.string() + "'");
}

DenseMatrix read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || bytes[0] != 'D' || bytes[1] != 'C' || bytes[2] != 'M' ||
      bytes[3] != 'M') {
    fail(ErrorCode::MalformedFrame, "'" + path.string() + "' is not a matrix dump");
  }
  auto u64_at = [&](std::size_t pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    return v;
  };
  std::uint32_t dim = 0;
  for (int i = 0; i < 4; ++i) dim |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
  const std::size_t count = static_cast<std::size_t>(dim) * dim;
  if (bytes.size() != 16 + 8 * count) {
    fail(ErrorCode::MalformedFrame, "dump of dimension " + std::to_string(dim) + " has " +
                                        std::to_string(bytes.size()) + " bytes");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(u64_at(16 + 8 * i));
  return DenseMatrix(dim, dim, std::move(values));
}

std::string to_string(TransportKind kind) {
  return kind == TransportKind::Tcp ? "tcp" : "in-process";
}

std::string to_string(RunMode mode) {
  return mode == RunMode::Centralized ? "centralized" : "distributed";
}

std::string run_report_json(const RunResult& result, const ReportContext& ctx,
                            std::size_t partitions) {
  return run_doc(result, ctx, partitions).dump(2);
}

std::string schedule_json(const Schedule& s, const CoverageReport& report) {
  return schedule_doc(s, report).dump(2);
}

std::string schedule_text(const Schedule& s, const CoverageReport& report) {
  std::ostringstream out;
  out << "sites t=" << s.t << ", r=" << s.r << "\n";
  for (std::size_t k = 0; k < s.predecessors.size(); ++k) {
    out << "  S" << k << " <-";
    if (s.predecessors[k].empty()) out << " (none)";
    for (std::size_t p : s.predecessors[k]) out << " S" << p;
    out << "\n";
  }
  out << (report.valid ? "valid" : "INVALID") << ": " << report.pairs_covered << "/"
      << report.pairs_expected << " pairs covered, " << report.duplicates.size()
      << " duplicates, " << report.gaps.size() << " gaps, max list length "
      << report.max_list_length << "\n";
  return out.str();
}

std::string cost_report_json(const CostReport& report, std::span<const std::size_t> widths) {
  return cost_doc(report, widths).dump(2);
}

Comparison compare_modes(std::span<const ColumnBlock> blocks, const RunOptions& options,
                         const std::vector<std::string>& site_names) {
  const std::size_t t = blocks.size();
  const Schedule schedule = build_schedule(t);

  // The centralized side is the covariance oracle; the eigen step runs once,
  // on the distributed result.
  RunOptions central_options = options;
  central_options.compute_eigen = false;
  central_options.corrupt_cov_block = nullptr;
  const RunResult central = run_centralized(blocks, central_options);
  const RunResult distributed = run_distributed(blocks, schedule, options);

  Comparison c;
  c.partitions = t;
  c.equal = bit_equal(central.covariance.matrix, distributed.covariance.matrix);
  c.centralized_checksum = matrix_checksum(central.covariance.matrix);
  c.distributed_checksum = matrix_checksum(distributed.covariance.matrix);
  c.centralized_ms = central.metrics.covariance_cpu_ms;
  c.distributed_ms = distributed.metrics.modeled_distributed_ms();

  std::vector<std::size_t> widths;
  for (const auto& b : blocks) widths.push_back(b.data.cols());
  c.cost = distributed_cost(widths, schedule);

  ReportContext ctx{RunMode::Centralized, options.transport, site_names};
  json doc;
  doc["report_version"] = kReportVersion;
  doc["partitions"] = t;
  doc["equal"] = c.equal;
  doc["centralized_checksum"] = c.centralized_checksum;
  doc["distributed_checksum"] = c.distributed_checksum;
  doc["centralized_ms"] = c.centralized_ms;
  doc["distributed_ms"] = c.distributed_ms;
  doc["measured_speedup"] = c.distributed_ms > 0.0 ? c.centralized_ms / c.distributed_ms : 0.0;
  doc["cost_model"] = cost_doc(c.cost, widths);
  doc["centralized"] = run_doc(central, ctx, t);
  ctx.mode = RunMode::Distributed;
  doc["distributed"] = run_doc(distributed, ctx, t);
  c.json = doc.dump(2);
  return c;
}

}  // namespace dcm
