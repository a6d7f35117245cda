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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "dcm/error.hpp"
#include "dcm/ingest.hpp"

namespace dcm {
namespace {

namespace fs = std::filesystem;

class IngestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dcm_ingest_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static ErrorCode code_of(auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no dcm::Error thrown";
    return ErrorCode::Mismatch;
  }

  fs::path dir_;
};

TEST_F(IngestTest, WhitespaceTable) {
  const auto m = load_table(write("a.txt", "  1 2.5\t-3\n\n4 5 6e-1\n"), TableFormat::Whitespace);
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(1, 2), 0.6);
  EXPECT_FALSE(m.labels());
}

TEST_F(IngestTest, CsvWithHeader) {
  const auto m = load_table(write("a.csv", "p,q\n1,2\n3,4\n"), TableFormat::Csv);
  EXPECT_EQ(*m.labels(), (Labels{"p", "q"}));
  EXPECT_EQ(m(1, 0), 3.0);
}

TEST_F(IngestTest, Errors) {
  EXPECT_EQ(code_of([&] { load_table(dir_ / "missing.txt", TableFormat::Whitespace); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([&] { load_table(write("r.txt", "1 2\n3\n"), TableFormat::Whitespace); }),
            ErrorCode::RaggedRows);
  EXPECT_EQ(code_of([&] { load_table(write("p.txt", "1 x\n"), TableFormat::Whitespace); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_table(write("n.txt", "1 nan\n"), TableFormat::Whitespace); }),
            ErrorCode::NonFiniteValue);
}

TEST_F(IngestTest, SaveLoadRoundTripIsExact) {
  DenseMatrix m(2, 2, {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567});
  for (auto fmt : {TableFormat::Csv, TableFormat::Whitespace}) {
    const fs::path p = dir_ / (fmt == TableFormat::Csv ? "m.csv" : "m.txt");
    save_table(m, p, fmt);
    EXPECT_TRUE(bit_equal(load_table(p, fmt), m));
  }
}

TEST(FormatFor, Extension) {
  EXPECT_EQ(format_for("x.csv"), TableFormat::Csv);
  EXPECT_EQ(format_for("mfeat-fac"), TableFormat::Whitespace);
}

TEST(Hjoin, JoinsColumns) {
  const DenseMatrix a(2, 1, {1, 2});
  const DenseMatrix b(2, 2, {3, 4, 5, 6});
  const std::vector<DenseMatrix> parts{a, b};
  const auto j = hjoin(parts);
  EXPECT_TRUE(bit_equal(j, DenseMatrix(2, 3, {1, 3, 4, 2, 5, 6})));
  const std::vector<DenseMatrix> bad{a, DenseMatrix(3, 1, {1, 2, 3})};
  EXPECT_THROW(hjoin(bad), Error);
}

TEST(PartitionSpec, ContiguousAndValidate) {
  const std::vector<std::size_t> widths{2, 3};
  const auto spec = contiguous_spec(widths);
  EXPECT_EQ(spec.total_cols, 5u);
  EXPECT_EQ(spec.groups[1].cols, (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_NO_THROW(spec.validate());

  auto broken = spec;
  broken.groups[1].cols.pop_back();
  EXPECT_THROW(broken.validate(), Error);
  broken = spec;
  broken.groups[1].cols[0] = 1;
  EXPECT_THROW(broken.validate(), Error);
}

TEST(PartitionSpec, JsonRoundTrip) {
  const auto spec = mfeat_preset(4);
  const auto back = PartitionSpec::from_json(spec.to_json());
  EXPECT_EQ(back.total_cols, spec.total_cols);
  ASSERT_EQ(back.sites(), spec.sites());
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    EXPECT_EQ(back.groups[i].cols, spec.groups[i].cols);
    EXPECT_EQ(back.groups[i].name, spec.groups[i].name);
  }
  EXPECT_THROW(PartitionSpec::from_json("{not json"), Error);
}

TEST(PartitionVertical, BlocksCarryGlobalColumns) {
  DenseMatrix m(2, 3, {1, 2, 3, 4, 5, 6});
  PartitionSpec spec{3, {{0, {0, 2}, "a"}, {1, {1}, "b"}}};
  const auto blocks = partition_vertical(m, spec);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].global_cols, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(bit_equal(blocks[0].data, DenseMatrix(2, 2, {1, 3, 4, 6})));
  EXPECT_TRUE(bit_equal(blocks[1].data, DenseMatrix(2, 1, {2, 5})));

  const auto wrong = contiguous_spec(std::vector<std::size_t>{2, 2});
  EXPECT_THROW(partition_vertical(m, wrong), Error);
}

TEST(Mfeat, Presets) {
  std::size_t total = 0;
  for (const auto& f : mfeat_files()) total += f.width;
  EXPECT_EQ(total, kMfeatColumns);

  const std::vector<std::vector<std::size_t>> widths{
      {356, 293}, {216, 140, 293}, {216, 140, 246, 47}, {216, 76, 64, 246, 47}, {216, 76, 64, 6, 240, 47}};
  for (std::size_t t = 2; t <= 6; ++t) {
    const auto spec = mfeat_preset(t);
    EXPECT_EQ(spec.sites(), t);
    EXPECT_EQ(spec.total_cols, kMfeatColumns);
    EXPECT_EQ(spec.widths(), widths[t - 2]) << "t=" << t;
    EXPECT_NO_THROW(spec.validate());
  }
  EXPECT_EQ(mfeat_preset(3).groups[1].name, "Fou-Kar");
  try {
    mfeat_preset(7);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedPartitionCount);
  }
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = generate_synthetic(50, 10, 42);
  EXPECT_TRUE(bit_equal(a, generate_synthetic(50, 10, 42)));
  EXPECT_FALSE(bit_equal(a, generate_synthetic(50, 10, 43)));
}

}  // namespace
}  // namespace dcm
