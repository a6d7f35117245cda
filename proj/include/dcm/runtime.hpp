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

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dcm/covariance.hpp"
#include "dcm/eigen.hpp"
#include "dcm/schedule.hpp"
#include "dcm/transport.hpp"
#include "dcm/wire.hpp"

namespace dcm {

struct SiteMetrics {
  SiteId site = 0;
  double local_ms = 0.0;
  double cross_ms = 0.0;
  /// Thread CPU time of the same phases: what the site would take on a
  /// machine of its own, independent of how many sites share a core here.
  double local_cpu_ms = 0.0;
  double cross_cpu_ms = 0.0;
  std::size_t cross_blocks = 0;
};

/// One raw-data transfer j -> k.
struct EdgeMetrics {
  SiteId from = 0;
  SiteId to = 0;
  /// DataBlock payload size of X_j.
  std::size_t bytes = 0;
  /// Full frame size on the wire, 0 for the in-process transport.
  std::size_t wire_bytes = 0;
  double transfer_ms = 0.0;
};

struct RunMetrics {
  std::vector<SiteMetrics> sites;
  std::vector<EdgeMetrics> edges;
  /// Centralized runs: the single covariance computation.
  double covariance_ms = 0.0;
  double covariance_cpu_ms = 0.0;
  double merge_ms = 0.0;
  double eigen_ms = 0.0;
  double total_ms = 0.0;
  std::size_t data_messages = 0;
  std::size_t cov_messages = 0;
  std::size_t done_messages = 0;

  /// max over sites of local time, plus max over sites of (cross time +
  /// transfer time of the blocks that site received). Uses CPU times for
  /// the compute phases. Centralized runs return covariance_cpu_ms.
  double modeled_distributed_ms() const;
};

struct RunResult {
  GlobalCovariance covariance;
  std::optional<EigenDecomposition> eigen;
  RunMetrics metrics;
};

struct RunOptions {
  TransportKind transport = TransportKind::InProcess;
  std::chrono::milliseconds deadline{60'000};
  bool compute_eigen = true;

  /// Test hook: applied to each CovBlock a site computes, before it is sent.
  std::function<void(CovBlock&)> corrupt_cov_block;
  /// Test hook: messages for which this returns true are never sent.
  std::function<bool(const ProtocolMessage&)> drop_message;
};

/// The distributed protocol: one worker thread per site plus a coordinator
/// (endpoint t) on the calling thread.
///
/// Each site ships its raw block to every site that lists it as a predecessor,
/// computes its local block, computes a cross block per received block as it
/// arrives, and forwards all blocks to the coordinator, which merges them and
/// runs the eigen-decomposition.
///
/// Throws InvalidArgument (bad site numbering or schedule), RowCountMismatch,
/// TooFewRows, TransportError, ProtocolError, TimeoutError, MissingPair or
/// OverlappingPair.
RunResult run_distributed(std::span<const ColumnBlock> blocks, const Schedule& schedule,
                          const RunOptions& options = {});

/// Reassembles the blocks into one matrix and computes everything directly.
/// Throws RowCountMismatch, TooFewRows or SpecMismatch.
RunResult run_centralized(std::span<const ColumnBlock> blocks, const RunOptions& options = {});

/// The full matrix, columns in global order.
DenseMatrix reassemble(std::span<const ColumnBlock> blocks);

}  // namespace dcm
