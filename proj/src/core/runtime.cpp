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

#include "dcm/runtime.hpp"

#include <time.h>

#include <algorithm>
#include <map>
#include <string>
#include <thread>

#include "dcm/error.hpp"
#include "dcm/ingest.hpp"

namespace dcm {

namespace {

double thread_cpu_ms() {
  timespec ts{};
  ::clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) * 1e-6;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Wall and thread-CPU stopwatch.
class Stopwatch {
 public:
  Stopwatch() : wall_(Clock::now()), cpu_(thread_cpu_ms()) {}
  double wall_ms() const { return elapsed_ms(wall_); }
  double cpu_ms() const { return thread_cpu_ms() - cpu_; }

 private:
  Clock::time_point wall_;
  double cpu_;
};

void check_blocks(std::span<const ColumnBlock> blocks) {
  if (blocks.empty()) fail(ErrorCode::InvalidArgument, "no column blocks");
  const std::size_t rows = blocks.front().data.rows();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].site != i) {
      fail(ErrorCode::InvalidArgument, "block " + std::to_string(i) + " belongs to site " +
                                           std::to_string(blocks[i].site));
    }
    validate_block(blocks[i]);
    if (blocks[i].data.rows() != rows) {
      fail(ErrorCode::RowCountMismatch, "site " + std::to_string(i) + " has " +
                                            std::to_string(blocks[i].data.rows()) +
                                            " rows, site 0 has " + std::to_string(rows));
    }
  }
  if (rows < 2) {
    fail(ErrorCode::TooFewRows, "sample covariance needs at least 2 rows, got " +
                                    std::to_string(rows));
  }
}

std::size_t total_columns(std::span<const ColumnBlock> blocks) {
  std::size_t m = 0;
  for (const auto& b : blocks) m += b.data.cols();
  return m;
}

class Protocol {
 public:
  Protocol(std::span<const ColumnBlock> blocks, const Schedule& schedule,
           const RunOptions& options, Transport& transport, Clock::time_point deadline)
      : blocks_(blocks),
        schedule_(schedule),
        options_(options),
        transport_(transport),
        deadline_(deadline),
        coordinator_(static_cast<std::uint32_t>(blocks.size())),
        site_metrics_(blocks.size()),
        site_edges_(blocks.size()) {}

  void run_site(std::size_t k) {
    try {
      site_body(k);
    } catch (...) {
      transport_.fail(coordinator_, std::current_exception());
    }
  }

  // Returns (locals, crosses) keyed by (site_a, site_b).
  std::map<std::pair<SiteId, SiteId>, CovBlock> gather(RunMetrics& metrics) {
    const std::size_t t = blocks_.size();
    const std::size_t expected = t + schedule_.transfer_count();
    std::map<std::pair<SiteId, SiteId>, CovBlock> blocks;
    std::size_t done = 0;
    while (blocks.size() < expected || done < t) {
      ProtocolMessage msg = transport_.receive(coordinator_, deadline_);
      switch (msg.kind) {
        case MessageKind::CovBlockMsg: {
          auto& b = std::get<CovBlock>(msg.payload);
          const auto key = std::make_pair(b.site_a, b.site_b);
          if (b.site_b != msg.sender || blocks.contains(key)) {
            fail(ErrorCode::ProtocolError, "unexpected covariance block (" +
                                               std::to_string(b.site_a) + "," +
                                               std::to_string(b.site_b) + ") from site " +
                                               std::to_string(msg.sender));
          }
          if (blocks.size() == expected) {
            fail(ErrorCode::ProtocolError, "more covariance blocks than the schedule implies");
          }
          blocks.emplace(key, std::move(b));
          ++metrics.cov_messages;
          break;
        }
        case MessageKind::Done:
          ++done;
          ++metrics.done_messages;
          break;
        default:
          fail(ErrorCode::ProtocolError, "coordinator received a data block");
      }
    }
    return blocks;
  }

  void collect(RunMetrics& metrics) {
    metrics.sites = site_metrics_;
    for (auto& edges : site_edges_) {
      metrics.edges.insert(metrics.edges.end(), edges.begin(), edges.end());
    }
    std::sort(metrics.edges.begin(), metrics.edges.end(), [](const auto& a, const auto& b) {
      return std::tie(a.to, a.from) < std::tie(b.to, b.from);
    });
    metrics.data_messages = metrics.edges.size();
  }

 private:
  // Returns the bytes written to the wire, or nullopt for a dropped message.
  std::optional<std::size_t> post(const ProtocolMessage& msg) {
    if (options_.drop_message && options_.drop_message(msg)) return std::nullopt;
    return transport_.send(msg);
  }

  void send_cov(std::uint32_t self, CovBlock block) {
    if (options_.corrupt_cov_block) options_.corrupt_cov_block(block);
    post(ProtocolMessage::cov(self, coordinator_, std::move(block)));
  }

  void site_body(std::size_t k) {
    const auto self = static_cast<std::uint32_t>(k);
    const ColumnBlock& own = blocks_[k];
    SiteMetrics& sm = site_metrics_[k];
    sm.site = k;

    for (std::size_t to : schedule_.successors(k)) {
      const auto start = Clock::now();
      const auto wire = post(ProtocolMessage::data(self, static_cast<std::uint32_t>(to), own));
      if (!wire) continue;
      site_edges_[k].push_back(EdgeMetrics{k, to, data_payload_size(own), *wire, elapsed_ms(start)});
    }

    {
      const Stopwatch watch;
      CovBlock local = local_covariance(own);
      sm.local_ms = watch.wall_ms();
      sm.local_cpu_ms = watch.cpu_ms();
      send_cov(self, std::move(local));
    }

    const auto& expected = schedule_.predecessors[k];
    std::vector<bool> seen(blocks_.size(), false);
    for (std::size_t received = 0; received < expected.size(); ++received) {
      ProtocolMessage msg = transport_.receive(k, deadline_);
      if (msg.kind != MessageKind::DataBlock) {
        fail(ErrorCode::ProtocolError, "site " + std::to_string(k) + " received a non-data message");
      }
      const auto from = static_cast<std::size_t>(msg.sender);
      if (std::find(expected.begin(), expected.end(), from) == expected.end() || seen[from]) {
        fail(ErrorCode::ProtocolError, "site " + std::to_string(k) +
                                           " received unscheduled data from site " +
                                           std::to_string(from));
      }
      seen[from] = true;
      const auto& sender = std::get<ColumnBlock>(msg.payload);
      if (sender.site != from) {
        fail(ErrorCode::ProtocolError, "data block of site " + std::to_string(sender.site) +
                                           " sent by site " + std::to_string(from));
      }

      const Stopwatch watch;
      CovBlock cross = cross_covariance(own, sender);
      sm.cross_ms += watch.wall_ms();
      sm.cross_cpu_ms += watch.cpu_ms();
      ++sm.cross_blocks;
      send_cov(self, std::move(cross));
    }
    post(ProtocolMessage::done(self, coordinator_));
  }

  std::span<const ColumnBlock> blocks_;
  const Schedule& schedule_;
  const RunOptions& options_;
  Transport& transport_;
  Clock::time_point deadline_;
  std::uint32_t coordinator_;
  std::vector<SiteMetrics> site_metrics_;
  std::vector<std::vector<EdgeMetrics>> site_edges_;
};

void check_schedule(const Schedule& schedule, std::size_t t) {
  if (schedule.t != t || schedule.predecessors.size() != t) {
    fail(ErrorCode::InvalidArgument, "schedule for " + std::to_string(schedule.t) +
                                         " sites used with " + std::to_string(t) + " blocks");
  }
  for (std::size_t k = 0; k < t; ++k) {
    for (std::size_t p : schedule.predecessors[k]) {
      if (p >= t || p == k) {
        fail(ErrorCode::InvalidArgument, "site " + std::to_string(k) +
                                             " lists invalid predecessor " + std::to_string(p));
      }
    }
  }
}

void finish(RunResult& result, const RunOptions& options) {
  if (!options.compute_eigen) return;
  const auto start = Clock::now();
  result.eigen = symmetric_eigen(result.covariance);
  result.metrics.eigen_ms = elapsed_ms(start);
}

}  // namespace

double RunMetrics::modeled_distributed_ms() const {
  if (sites.empty()) return covariance_cpu_ms;
  double local = 0.0;
  double cross = 0.0;
  for (const auto& s : sites) {
    double incoming = 0.0;
    for (const auto& e : edges) {
      if (e.to == s.site) incoming += e.transfer_ms;
    }
    local = std::max(local, s.local_cpu_ms);
    cross = std::max(cross, s.cross_cpu_ms + incoming);
  }
  return local + cross;
}

RunResult run_distributed(std::span<const ColumnBlock> blocks, const Schedule& schedule,
                          const RunOptions& options) {
  const auto start = Clock::now();
  check_blocks(blocks);
  check_schedule(schedule, blocks.size());

  const std::size_t t = blocks.size();
  auto transport = make_transport(options.transport, t + 1);
  Protocol protocol(blocks, schedule, options, *transport, start + options.deadline);

  RunResult result;
  std::map<std::pair<SiteId, SiteId>, CovBlock> gathered;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> workers;
    workers.reserve(t);
    for (std::size_t k = 0; k < t; ++k) {
      workers.emplace_back([&protocol, k] { protocol.run_site(k); });
    }
    try {
      gathered = protocol.gather(result.metrics);
    } catch (...) {
      failure = std::current_exception();
    }
    transport->interrupt();
  }
  transport->shutdown();
  if (failure) std::rethrow_exception(failure);
  protocol.collect(result.metrics);

  const auto merge_start = Clock::now();
  std::vector<CovBlock> locals;
  std::vector<CovBlock> crosses;
  for (auto& [key, block] : gathered) {
    (key.first == key.second ? locals : crosses).push_back(std::move(block));
  }
  result.covariance = merge_blocks(locals, crosses, total_columns(blocks));
  result.metrics.merge_ms = elapsed_ms(merge_start);

  finish(result, options);
  result.metrics.total_ms = elapsed_ms(start);
  return result;
}

DenseMatrix reassemble(std::span<const ColumnBlock> blocks) {
  std::vector<DenseMatrix> tables;
  std::vector<std::size_t> joined_to_global;
  for (const auto& b : blocks) {
    validate_block(b);
    tables.push_back(b.data);
    joined_to_global.insert(joined_to_global.end(), b.global_cols.begin(), b.global_cols.end());
  }
  DenseMatrix joined = hjoin(tables);

  const std::size_t m = joined_to_global.size();
  std::vector<std::size_t> position(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t g = joined_to_global[j];
    if (g >= m || position[g] != m) {
      fail(ErrorCode::SpecMismatch, "blocks do not tile columns [0, " + std::to_string(m) + ")");
    }
    position[g] = j;
  }
  if (std::is_sorted(joined_to_global.begin(), joined_to_global.end())) return joined;
  return column_slice(joined, position);
}

RunResult run_centralized(std::span<const ColumnBlock> blocks, const RunOptions& options) {
  const auto start = Clock::now();
  if (blocks.empty()) fail(ErrorCode::InvalidArgument, "no column blocks");
  const DenseMatrix full = reassemble(blocks);

  RunResult result;
  const Stopwatch watch;
  result.covariance = centralized_covariance(full);
  result.metrics.covariance_ms = watch.wall_ms();
  result.metrics.covariance_cpu_ms = watch.cpu_ms();

  finish(result, options);
  result.metrics.total_ms = elapsed_ms(start);
  return result;
}

}  // namespace dcm
