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

#include "dcm/ingest.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "dcm/error.hpp"

namespace dcm {

namespace {

std::optional<double> parse_number(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::vector<std::string> split_fields(const std::string& line, TableFormat format) {
  std::vector<std::string> fields;
  if (format == TableFormat::Csv) {
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
  } else {
    std::istringstream in(line);
    std::string field;
    while (in >> field) fields.push_back(field);
  }
  return fields;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

TableFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TableFormat::Csv : TableFormat::Whitespace;
}

DenseMatrix load_table(const std::filesystem::path& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");

  std::optional<Labels> labels;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line, format);
    const std::string where = path.string() + ":" + std::to_string(line_no);

    if (first) {
      cols = fields.size();
      first = false;
      if (format == TableFormat::Csv) {
        bool numeric = true;
        for (const auto& f : fields) numeric = numeric && parse_number(f).has_value();
        if (!numeric) {
          labels.emplace();
          for (const auto& f : fields) labels->push_back(trim(f));
          continue;
        }
      }
    }
    if (fields.size() != cols) {
      fail(ErrorCode::RaggedRows, where + " has " + std::to_string(fields.size()) +
                                      " fields, expected " + std::to_string(cols));
    }
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) fail(ErrorCode::ParseError, where + ": '" + f + "' is not a number");
      values.push_back(*v);
    }
    ++rows;
  }
  if (in.bad()) fail(ErrorCode::IoError, "read error on '" + path.string() + "'");
  return DenseMatrix(rows, cols, std::move(values), std::move(labels));
}

void save_table(const DenseMatrix& m, const std::filesystem::path& path, TableFormat format) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot create '" + path.string() + "'");
  const char sep = format == TableFormat::Csv ? ',' : ' ';
  if (format == TableFormat::Csv && m.labels()) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << (*m.labels())[c];
    out << '\n';
  }
  std::array<char, 32> buf{};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), m(r, c));
      if (c) out << sep;
      out.write(buf.data(), res.ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write error on '" + path.string() + "'");
}

DenseMatrix hjoin(std::span<const DenseMatrix> tables) {
  if (tables.empty()) return {};
  const std::size_t rows = tables.front().rows();
  std::size_t cols = 0;
  bool all_labelled = true;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].rows() != rows) {
      fail(ErrorCode::RowCountMismatch, "table " + std::to_string(i) + " has " +
                                            std::to_string(tables[i].rows()) + " rows, expected " +
                                            std::to_string(rows));
    }
    cols += tables[i].cols();
    all_labelled = all_labelled && tables[i].labels().has_value();
  }

  DenseMatrix out = DenseMatrix::zeros(rows, cols);
  std::size_t offset = 0;
  for (const auto& t : tables) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) out(r, offset + c) = t(r, c);
    }
    offset += t.cols();
  }
  if (all_labelled) {
    Labels labels;
    for (const auto& t : tables) labels.insert(labels.end(), t.labels()->begin(), t.labels()->end());
    // Tables that repeat a label name are joined without labels.
    const std::unordered_set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() == labels.size()) out.set_labels(std::move(labels));
  }
  return out;
}

std::vector<std::size_t> PartitionSpec::widths() const {
  std::vector<std::size_t> w;
  w.reserve(groups.size());
  for (const auto& g : groups) w.push_back(g.cols.size());
  return w;
}

void PartitionSpec::validate() const {
  if (groups.empty()) fail(ErrorCode::SpecMismatch, "partition has no groups");
  std::vector<bool> seen(total_cols, false);
  std::size_t count = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    if (g.site != i) {
      fail(ErrorCode::SpecMismatch, "group " + std::to_string(i) + " is labelled site " +
                                        std::to_string(g.site));
    }
    if (g.cols.empty()) fail(ErrorCode::SpecMismatch, "site " + std::to_string(i) + " has no columns");
    for (std::size_t j = 0; j < g.cols.size(); ++j) {
      const std::size_t c = g.cols[j];
      if (j > 0 && c <= g.cols[j - 1]) {
        fail(ErrorCode::SpecMismatch,
             "site " + std::to_string(i) + " columns are not strictly increasing");
      }
      if (c >= total_cols) {
        fail(ErrorCode::SpecMismatch, "column " + std::to_string(c) + " outside [0, " +
                                          std::to_string(total_cols) + ")");
      }
      if (seen[c]) fail(ErrorCode::SpecMismatch, "column " + std::to_string(c) + " assigned twice");
      seen[c] = true;
      ++count;
    }
  }
  if (count != total_cols) {
    fail(ErrorCode::SpecMismatch, std::to_string(total_cols - count) + " of " +
                                      std::to_string(total_cols) + " columns are unassigned");
  }
}

std::string PartitionSpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["total_cols"] = total_cols;
  doc["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : groups) {
    nlohmann::ordered_json jg;
    jg["site"] = g.site;
    jg["cols"] = g.cols;
    jg["name"] = g.name;
    doc["groups"].push_back(std::move(jg));
  }
  return doc.dump(2);
}

PartitionSpec PartitionSpec::from_json(const std::string& text) {
  PartitionSpec spec;
  try {
    const auto doc = nlohmann::json::parse(text);
    spec.total_cols = doc.at("total_cols").get<std::size_t>();
    for (const auto& jg : doc.at("groups")) {
      PartitionGroup g;
      g.site = jg.at("site").get<std::size_t>();
      g.cols = jg.at("cols").get<std::vector<std::size_t>>();
      if (jg.contains("name")) g.name = jg.at("name").get<std::string>();
      spec.groups.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("partition spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

PartitionSpec contiguous_spec(std::span<const std::size_t> widths,
                              std::span<const std::string> names) {
  PartitionSpec spec;
  std::size_t next = 0;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    PartitionGroup g;
    g.site = i;
    g.name = i < names.size() ? names[i] : "site" + std::to_string(i);
    for (std::size_t c = 0; c < widths[i]; ++c) g.cols.push_back(next++);
    spec.groups.push_back(std::move(g));
  }
  spec.total_cols = next;
  return spec;
}

std::vector<ColumnBlock> partition_vertical(const DenseMatrix& m, const PartitionSpec& spec) {
  if (spec.total_cols != m.cols()) {
    fail(ErrorCode::SpecMismatch, "spec covers " + std::to_string(spec.total_cols) +
                                      " columns, matrix has " + std::to_string(m.cols()));
  }
  spec.validate();
  std::vector<ColumnBlock> blocks;
  blocks.reserve(spec.groups.size());
  for (const auto& g : spec.groups) {
    blocks.push_back(ColumnBlock{g.site, column_slice(m, g.cols), g.cols});
  }
  return blocks;
}

std::span<const MfeatFile> mfeat_files() noexcept {
  static constexpr std::array<MfeatFile, 6> kFiles{{
      {"fac", 216},
      {"fou", 76},
      {"kar", 64},
      {"mor", 6},
      {"pix", 240},
      {"zer", 47},
  }};
  return kFiles;
}

PartitionSpec mfeat_preset(std::size_t partitions) {
  // Each site is a run of consecutive Mfeat files: {first file, file count, name}.
  struct Run {
    std::size_t first;
    std::size_t count;
    const char* name;
  };
  std::vector<Run> runs;
  switch (partitions) {
    case 2: runs = {{0, 3, "Fact-Fou-Kar"}, {3, 3, "Mor-Pix-Zer"}}; break;
    case 3: runs = {{0, 1, "Fact"}, {1, 2, "Fou-Kar"}, {3, 3, "Mor-Pix-Zer"}}; break;
    case 4: runs = {{0, 1, "Fact"}, {1, 2, "Fou-Kar"}, {3, 2, "Mor-Pix"}, {5, 1, "Zer"}}; break;
    case 5:
      runs = {{0, 1, "Fact"}, {1, 1, "Fou"}, {2, 1, "Kar"}, {3, 2, "Mor-Pix"}, {5, 1, "Zer"}};
      break;
    case 6:
      runs = {{0, 1, "Fact"}, {1, 1, "Fou"}, {2, 1, "Kar"},
              {3, 1, "Mor"},  {4, 1, "Pix"}, {5, 1, "Zer"}};
      break;
    default:
      fail(ErrorCode::UnsupportedPartitionCount,
           "Mfeat layouts exist for 2..6 partitions, not " + std::to_string(partitions));
  }

  const auto files = mfeat_files();
  std::vector<std::size_t> widths;
  std::vector<std::string> names;
  for (const auto& run : runs) {
    std::size_t w = 0;
    for (std::size_t f = run.first; f < run.first + run.count; ++f) w += files[f].width;
    widths.push_back(w);
    names.emplace_back(run.name);
  }
  return contiguous_spec(widths, names);
}

DenseMatrix generate_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  constexpr std::size_t kFactors = 8;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<double> loading(kFactors * cols);
  for (auto& l : loading) l = normal(rng);
  std::vector<double> offset(cols), scale(cols), noise(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    offset[c] = 10.0 * normal(rng);
    scale[c] = 0.5 + 4.5 * uniform(rng);
    noise[c] = 0.2 + uniform(rng);
  }

  std::vector<double> values(rows * cols);
  std::array<double, kFactors> z{};
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& f : z) f = normal(rng);
    for (std::size_t c = 0; c < cols; ++c) {
      double x = noise[c] * normal(rng);
      for (std::size_t f = 0; f < kFactors; ++f) x += z[f] * loading[f * cols + c];
      values[r * cols + c] = offset[c] + scale[c] * x;
    }
  }
  return DenseMatrix(rows, cols, std::move(values));
}

}  // namespace dcm
