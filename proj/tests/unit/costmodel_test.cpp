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

#include <vector>

#include "dcm/costmodel.hpp"
#include "dcm/error.hpp"
#include "dcm/schedule.hpp"

namespace dcm {
namespace {

TEST(CentralizedCost, PairCount) {
  EXPECT_EQ(centralized_cost(0), 0u);
  EXPECT_EQ(centralized_cost(1), 0u);
  EXPECT_EQ(centralized_cost(649), 210276u);
}

TEST(DistributedCost, EqualWidthsFourSites) {
  const std::vector<std::size_t> widths(4, 100);
  const auto r = distributed_cost(widths, build_schedule(4));
  EXPECT_EQ(r.t_c, 79800u);
  EXPECT_EQ(r.t_l, 4950u);
  EXPECT_EQ(r.t_cr_cm_per_site, (std::vector<std::uint64_t>{10100, 10100, 20200, 20200}));
  EXPECT_EQ(r.t_d, 25150u);
  EXPECT_NEAR(r.speedup, 79800.0 / 25150.0, 1e-15);
}

TEST(DistributedCost, MfeatThreeSites) {
  const std::vector<std::size_t> widths{216, 140, 293};
  const auto r = distributed_cost(widths, build_schedule(3));
  EXPECT_EQ(r.t_c, 210276u);
  EXPECT_EQ(r.t_l_per_site, (std::vector<std::uint64_t>{23220, 9730, 42778}));
  // 0 <- 2, 1 <- 0, 2 <- 1
  EXPECT_EQ(r.t_cr_cm_per_site, (std::vector<std::uint64_t>{63581, 30456, 41160}));
  EXPECT_EQ(r.t_d, 42778u + 63581u);
}

TEST(DistributedCost, SingleSite) {
  const std::vector<std::size_t> widths{50};
  const auto r = distributed_cost(widths, build_schedule(1));
  EXPECT_EQ(r.t_c, r.t_d);
  EXPECT_DOUBLE_EQ(r.speedup, 1.0);
}

TEST(DistributedCost, FixedTotalWidthDecreasesWithSites) {
  // 600 columns split evenly over t sites.
  const std::vector<std::uint64_t> expected{135150, 60100, 56475, 36180, 35250};
  for (std::size_t t = 2; t <= 6; ++t) {
    const std::vector<std::size_t> widths(t, 600 / t);
    EXPECT_EQ(distributed_cost(widths, build_schedule(t)).t_d, expected[t - 2]) << "t=" << t;
  }
}

TEST(DistributedCost, Errors) {
  const std::vector<std::size_t> three{1, 2, 3};
  EXPECT_THROW(distributed_cost(three, build_schedule(4)), Error);
  const std::vector<std::size_t> zero{0, 2};
  EXPECT_THROW(distributed_cost(zero, build_schedule(2)), Error);
}

TEST(SpeedupLowerBound, AtLeastHalfTheSites) {
  for (std::size_t t = 2; t <= 10; ++t)
    for (std::size_t gamma : {10, 50, 100}) EXPECT_GE(speedup_lower_bound(t, gamma), static_cast<double>(t / 2));
  EXPECT_THROW(speedup_lower_bound(1, 10), Error);
  EXPECT_THROW(speedup_lower_bound(4, 1), Error);
}

}  // namespace
}  // namespace dcm
