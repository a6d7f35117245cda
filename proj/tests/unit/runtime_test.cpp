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

#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <vector>

#include "dcm/error.hpp"
#include "dcm/runtime.hpp"
#include "fixtures.hpp"

namespace dcm {
namespace {

using namespace std::chrono_literals;

RunOptions no_eigen(TransportKind kind = TransportKind::InProcess) {
  RunOptions o;
  o.transport = kind;
  o.compute_eigen = false;
  o.deadline = 20s;
  return o;
}

TEST(Runtime, ThreeSiteFixtureMatchesCentralized) {
  const auto blocks = testing::split(testing::three_site_data(), testing::three_site_widths());
  const auto d = run_distributed(blocks, build_schedule(3));
  const auto c = run_centralized(blocks);
  EXPECT_TRUE(bit_equal(d.covariance.matrix, c.covariance.matrix));
  ASSERT_TRUE(d.eigen && c.eigen);
  EXPECT_EQ(d.eigen->eigenvalues, c.eigen->eigenvalues);
}

TEST(Runtime, RandomPartitionsAreBitExact) {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = testing::random_matrix(40, 19, seed);
    for (std::size_t t = 1; t <= 7; ++t) {
      const auto blocks = testing::split(m, testing::random_widths(m.cols(), t, rng));
      const auto d = run_distributed(blocks, build_schedule(t), no_eigen());
      const auto c = run_centralized(blocks, no_eigen());
      EXPECT_TRUE(bit_equal(d.covariance.matrix, c.covariance.matrix)) << "seed=" << seed << " t=" << t;
    }
  }
}

TEST(Runtime, NonContiguousPartition) {
  const auto m = testing::random_matrix(25, 7, 4);
  PartitionSpec spec{7, {{0, {0, 3, 6}, "a"}, {1, {1, 4}, "b"}, {2, {2, 5}, "c"}}};
  const auto blocks = partition_vertical(m, spec);
  const auto d = run_distributed(blocks, build_schedule(3), no_eigen());
  EXPECT_TRUE(bit_equal(d.covariance.matrix, centralized_covariance(m).matrix));
  EXPECT_TRUE(bit_equal(reassemble(blocks), m));
}

TEST(Runtime, TcpMatchesInProcess) {
  const auto m = testing::random_matrix(60, 13, 8);
  const auto blocks = testing::split(m, {3, 4, 2, 4});
  const auto a = run_distributed(blocks, build_schedule(4), no_eigen(TransportKind::InProcess));
  const auto b = run_distributed(blocks, build_schedule(4), no_eigen(TransportKind::Tcp));
  EXPECT_TRUE(bit_equal(a.covariance.matrix, b.covariance.matrix));
  for (const auto& e : b.metrics.edges) EXPECT_GT(e.wire_bytes, e.bytes);
}

TEST(Runtime, MessageCountsFollowSchedule) {
  const auto m = testing::random_matrix(20, 10, 2);
  std::mt19937_64 rng(5);
  for (std::size_t t = 1; t <= 6; ++t) {
    const auto blocks = testing::split(m, testing::random_widths(10, t, rng));
    const Schedule s = build_schedule(t);
    const auto r = run_distributed(blocks, s, no_eigen());
    EXPECT_EQ(r.metrics.data_messages, s.transfer_count());
    EXPECT_EQ(r.metrics.cov_messages, t + s.transfer_count());
    EXPECT_EQ(r.metrics.done_messages, t);
    EXPECT_EQ(r.metrics.edges.size(), s.transfer_count());
    EXPECT_EQ(r.metrics.sites.size(), t);
    for (const auto& e : r.metrics.edges) EXPECT_EQ(e.bytes, data_payload_size(blocks[e.from]));
  }
}

TEST(Runtime, DroppedMessageTimesOut) {
  const auto blocks = testing::split(testing::three_site_data(), testing::three_site_widths());
  RunOptions o = no_eigen();
  o.deadline = 300ms;
  o.drop_message = [](const ProtocolMessage& msg) { return msg.kind == MessageKind::DataBlock; };
  try {
    run_distributed(blocks, build_schedule(3), o);
    FAIL() << "expected a timeout";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeoutError);
  }
}

TEST(Runtime, CorruptedBlockBreaksEquality) {
  const auto blocks = testing::split(testing::three_site_data(), testing::three_site_widths());
  RunOptions o = no_eigen();
  o.corrupt_cov_block = [](CovBlock& b) {
    if (b.site_a == 2 && b.site_b == 2) b.block(0, 0) = std::nextafter(b.block(0, 0), 10.0);
  };
  const auto d = run_distributed(blocks, build_schedule(3), o);
  EXPECT_FALSE(bit_equal(d.covariance.matrix, run_centralized(blocks, no_eigen()).covariance.matrix));
}

TEST(Runtime, RejectsBrokenInputs) {
  const auto blocks = testing::split(testing::three_site_data(), testing::three_site_widths());
  Schedule broken = build_schedule(3);
  broken.predecessors[0].clear();
  EXPECT_THROW(run_distributed(blocks, broken, no_eigen()), Error);

  auto ragged = blocks;
  ragged[1].data = DenseMatrix(4, 2, std::vector<double>(8, 1.0));
  EXPECT_THROW(run_distributed(ragged, build_schedule(3), no_eigen()), Error);
  EXPECT_THROW(run_centralized(ragged, no_eigen()), Error);
}

TEST(Runtime, ModeledTimeUsesSlowestSite) {
  RunMetrics m;
  m.sites = {{0, 0, 0, 5.0, 1.0, 0}, {1, 0, 0, 2.0, 4.0, 1}};
  m.edges = {{0, 1, 10, 0, 0.5}};
  EXPECT_DOUBLE_EQ(m.modeled_distributed_ms(), 5.0 + 4.5);
}

}  // namespace
}  // namespace dcm
