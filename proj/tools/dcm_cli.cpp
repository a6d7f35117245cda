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

// dcm: command-line front end over the C API.
//
//   dcm schedule --sites 5 [--json]
//   dcm run a.txt b.txt --preset mfeat-2 --mode distributed --transport tcp
//   dcm compare data.txt --presets 2,3,4,5,6 --plot-data times.dat
//   dcm cost-model --widths 216,140,293
//   dcm gen --rows 2000 --cols 649 --seed 7 --preset mfeat-6 --out-dir data/

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcm/dcm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitProtocol = 4;
constexpr int kExitMismatch = 5;

struct CliFailure {
  int exit_code;
  std::string message;
};

int exit_code_for(dcm_status status) {
  switch (status) {
    case DCM_OK:
      return kExitOk;
    case DCM_E_INVALID_ARGUMENT:
    case DCM_E_UNSUPPORTED_PARTITION_COUNT:
      return kExitUsage;
    case DCM_E_MALFORMED_FRAME:
    case DCM_E_UNKNOWN_KIND:
    case DCM_E_TRANSPORT:
    case DCM_E_TIMEOUT:
    case DCM_E_PROTOCOL:
    case DCM_E_MISSING_PAIR:
    case DCM_E_OVERLAPPING_PAIR:
      return kExitProtocol;
    case DCM_E_MISMATCH:
      return kExitMismatch;
    default:
      return kExitData;
  }
}

void check(dcm_status status) {
  if (status != DCM_OK) {
    const std::string detail = dcm_last_error();
    throw CliFailure{exit_code_for(status),
                     detail.empty() ? std::string(dcm_status_name(status)) : detail};
  }
}

[[noreturn]] void usage_error(const std::string& message) { throw CliFailure{kExitUsage, message}; }

struct MatrixDeleter {
  void operator()(dcm_matrix_s* m) const { dcm_matrix_free(m); }
};
struct PartitionDeleter {
  void operator()(dcm_partition_s* p) const { dcm_partition_free(p); }
};
struct ResultDeleter {
  void operator()(dcm_result_s* r) const { dcm_result_free(r); }
};
using Matrix = std::unique_ptr<dcm_matrix_s, MatrixDeleter>;
using Partition = std::unique_ptr<dcm_partition_s, PartitionDeleter>;
using Result = std::unique_ptr<dcm_result_s, ResultDeleter>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  dcm_string_free(s);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw CliFailure{kExitData, "cannot write '" + path + "'"};
  out << text << '\n';
}

std::size_t preset_count(const std::string& name) {
  const std::string prefix = "mfeat-";
  std::string digits = name.rfind(prefix, 0) == 0 ? name.substr(prefix.size()) : name;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    usage_error("unknown preset '" + name + "' (expected mfeat-2 .. mfeat-6)");
  }
  return std::stoul(digits);
}

// Loads every input and joins them side by side in the order given.
Matrix load_inputs(const std::vector<std::string>& files) {
  if (files.empty()) usage_error("at least one input file is required");
  std::vector<Matrix> tables;
  std::vector<dcm_matrix_t> raw;
  for (const auto& f : files) {
    dcm_matrix_t m = nullptr;
    check(dcm_matrix_load(f.c_str(), DCM_FORMAT_AUTO, &m));
    tables.emplace_back(m);
    raw.push_back(m);
  }
  if (tables.size() == 1) return std::move(tables.front());
  dcm_matrix_t joined = nullptr;
  check(dcm_matrix_hjoin(raw.data(), raw.size(), &joined));
  return Matrix(joined);
}

struct SpecArgs {
  std::string preset;
  std::string partition_file;
  std::vector<std::size_t> widths;
};

void add_spec_options(CLI::App* cmd, SpecArgs& args) {
  auto* preset = cmd->add_option("--preset", args.preset, "Mfeat layout, mfeat-2 .. mfeat-6");
  auto* file = cmd->add_option("--partition", args.partition_file, "PartitionSpec JSON file")
                   ->check(CLI::ExistingFile);
  auto* widths = cmd->add_option("--widths", args.widths, "Contiguous group widths")->delimiter(',');
  preset->excludes(file)->excludes(widths);
  file->excludes(widths);
}

// With no explicit spec each input file becomes one site.
Partition resolve_spec(const SpecArgs& args, const std::vector<std::string>& files,
                       dcm_matrix_t data) {
  dcm_partition_t p = nullptr;
  if (!args.preset.empty()) {
    check(dcm_partition_mfeat(preset_count(args.preset), &p));
  } else if (!args.partition_file.empty()) {
    std::ifstream in(args.partition_file);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    check(dcm_partition_from_json(text.c_str(), &p));
  } else if (!args.widths.empty()) {
    check(dcm_partition_from_widths(args.widths.data(), args.widths.size(), &p));
  } else if (files.size() > 1) {
    std::vector<std::size_t> widths;
    for (const auto& f : files) {
      dcm_matrix_t m = nullptr;
      check(dcm_matrix_load(f.c_str(), DCM_FORMAT_AUTO, &m));
      widths.push_back(dcm_matrix_cols(m));
      dcm_matrix_free(m);
    }
    check(dcm_partition_from_widths(widths.data(), widths.size(), &p));
  } else {
    const std::size_t cols = dcm_matrix_cols(data);
    check(dcm_partition_from_widths(&cols, 1, &p));
  }
  return Partition(p);
}

dcm_run_options base_options(const std::string& transport) {
  dcm_run_options o;
  dcm_run_options_init(&o);
  if (transport == "tcp") {
    o.transport = DCM_TRANSPORT_TCP;
  } else if (transport != "in-process") {
    usage_error("unknown transport '" + transport + "' (in-process or tcp)");
  }
  if (const char* env = std::getenv("DCM_DEADLINE_MS")) {
    char* end = nullptr;
    const unsigned long ms = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || ms == 0) usage_error("DCM_DEADLINE_MS must be a positive integer");
    o.deadline_ms = static_cast<uint32_t>(ms);
  }
  return o;
}

int cmd_schedule(std::size_t sites, bool as_json) {
  if (sites == 0) usage_error("--sites must be at least 1");
  char* out = nullptr;
  check(as_json ? dcm_schedule_json(sites, &out) : dcm_schedule_text(sites, &out));
  emit(take_string(out), "");
  return kExitOk;
}

struct RunArgs {
  std::vector<std::string> files;
  SpecArgs spec;
  std::string mode = "distributed";
  std::string transport = "in-process";
  std::string out;
  std::string dump;
  bool skip_eigen = false;
};

int cmd_run(const RunArgs& args) {
  const Matrix data = load_inputs(args.files);
  const Partition spec = resolve_spec(args.spec, args.files, data.get());
  dcm_run_options o = base_options(args.transport);
  o.skip_eigen = args.skip_eigen ? 1 : 0;
  const dcm_mode mode = args.mode == "centralized" ? DCM_MODE_CENTRALIZED : DCM_MODE_DISTRIBUTED;

  dcm_result_t r = nullptr;
  check(dcm_run(data.get(), spec.get(), mode, &o, &r));
  const Result result(r);

  char* report = nullptr;
  check(dcm_result_report_json(result.get(), &report));
  emit(take_string(report), args.out);

  if (!args.dump.empty()) {
    check(dcm_result_dump_matrix(result.get(), args.dump.c_str()));
    char checksum[65];
    check(dcm_result_checksum(result.get(), checksum));
    nlohmann::ordered_json header = {{"format", "DCMM"},
                                     {"dim", dcm_result_dim(result.get())},
                                     {"dtype", "binary64-le"},
                                     {"order", "row-major"},
                                     {"header_bytes", 16},
                                     {"matrix_checksum", checksum}};
    emit(header.dump(2), args.dump + ".json");
  }
  return kExitOk;
}

struct CompareArgs {
  std::vector<std::string> files;
  SpecArgs spec;
  std::vector<std::size_t> presets;
  std::string transport = "in-process";
  std::string out;
  std::string plot_data;
  bool inject_corruption = false;
  bool skip_eigen = false;
};

int cmd_compare(const CompareArgs& args) {
  const Matrix data = load_inputs(args.files);
  std::vector<Partition> specs;
  if (!args.presets.empty()) {
    for (std::size_t t : args.presets) {
      dcm_partition_t p = nullptr;
      check(dcm_partition_mfeat(t, &p));
      specs.emplace_back(p);
    }
  } else {
    specs.push_back(resolve_spec(args.spec, args.files, data.get()));
  }

  dcm_run_options o = base_options(args.transport);
  o.inject_corruption = args.inject_corruption ? 1 : 0;
  o.skip_eigen = args.skip_eigen ? 1 : 0;

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string plot = "# partitions distributed_ms\n";
  bool mismatch = false;
  std::string mismatch_message;
  for (const auto& spec : specs) {
    char* out = nullptr;
    const dcm_status status = dcm_compare(data.get(), spec.get(), &o, &out);
    if (status == DCM_E_MISMATCH) {
      mismatch = true;
      mismatch_message = dcm_last_error();
    } else {
      check(status);
    }
    auto doc = nlohmann::ordered_json::parse(take_string(out));
    std::cerr << "partitions=" << doc["partitions"] << " equal=" << (doc["equal"] ? "true" : "false")
              << " centralized_ms=" << doc["centralized_ms"]
              << " distributed_ms=" << doc["distributed_ms"] << '\n';
    plot += doc["partitions"].dump() + " " + doc["distributed_ms"].dump() + "\n";
    rows.push_back(std::move(doc));
  }

  nlohmann::ordered_json report = {{"report_version", 1}, {"comparisons", rows}};
  emit(report.dump(2), args.out);
  if (!args.plot_data.empty()) {
    std::ofstream f(args.plot_data);
    if (!f) throw CliFailure{kExitData, "cannot write '" + args.plot_data + "'"};
    f << plot;
  }
  if (mismatch) throw CliFailure{kExitMismatch, "MismatchError: " + mismatch_message};
  return kExitOk;
}

int cmd_cost_model(const std::vector<std::size_t>& widths, std::size_t sites, std::size_t gamma) {
  std::vector<std::size_t> w = widths;
  if (w.empty()) {
    if (sites == 0 || gamma == 0) usage_error("give --widths, or both --sites and --gamma");
    w.assign(sites, gamma);
  }
  char* out = nullptr;
  check(dcm_cost_model_json(w.data(), w.size(), &out));
  emit(take_string(out), "");
  return kExitOk;
}

struct GenArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string preset;
  std::string out_dir;
};

int cmd_gen(const GenArgs& args) {
  if (args.out.empty() == args.out_dir.empty()) usage_error("give exactly one of --out or --out-dir");
  if (!args.out_dir.empty() && args.preset.empty()) usage_error("--out-dir needs --preset");
  dcm_matrix_t m = nullptr;
  check(dcm_matrix_generate(args.rows, args.cols, args.seed, &m));
  const Matrix data(m);
  if (!args.out.empty()) {
    check(dcm_matrix_save(data.get(), args.out.c_str(), DCM_FORMAT_AUTO));
    return kExitOk;
  }
  dcm_partition_t p = nullptr;
  check(dcm_partition_mfeat(preset_count(args.preset), &p));
  const Partition spec(p);
  check(dcm_partition_write_tables(spec.get(), data.get(), args.out_dir.c_str()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed covariance matrix computation over vertically partitioned data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dcm_version());

  std::size_t schedule_sites = 0;
  bool schedule_json = false;
  auto* schedule = app.add_subcommand("schedule", "Print the predecessor schedule for t sites");
  schedule->add_option("--sites", schedule_sites, "Number of sites")->required();
  schedule->add_flag("--json", schedule_json, "JSON output");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Compute the global covariance matrix and its eigenvalues");
  run->add_option("files", run_args.files, "Input tables (joined side by side)")->required();
  add_spec_options(run, run_args.spec);
  run->add_option("--mode", run_args.mode)->check(CLI::IsMember({"centralized", "distributed"}));
  run->add_option("--transport", run_args.transport)->check(CLI::IsMember({"in-process", "tcp"}));
  run->add_option("--out", run_args.out, "Write the report here instead of stdout");
  run->add_option("--dump-matrix", run_args.dump, "Write the covariance matrix (DCMM format)");
  run->add_flag("--skip-eigen", run_args.skip_eigen);

  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Run both modes and check bit-exact equality");
  compare->add_option("files", cmp_args.files, "Input tables (joined side by side)")->required();
  add_spec_options(compare, cmp_args.spec);
  compare->add_option("--presets", cmp_args.presets, "Mfeat partition counts, e.g. 2,3,4,5,6")
      ->delimiter(',');
  compare->add_option("--transport", cmp_args.transport)
      ->check(CLI::IsMember({"in-process", "tcp"}));
  compare->add_option("--out", cmp_args.out);
  compare->add_option("--plot-data", cmp_args.plot_data, "Two-column partitions/time data file");
  compare->add_flag("--inject-corruption", cmp_args.inject_corruption,
                    "Perturb one distributed block (negative control)");
  compare->add_flag("--skip-eigen", cmp_args.skip_eigen);

  std::vector<std::size_t> cost_widths;
  std::size_t cost_sites = 0;
  std::size_t cost_gamma = 0;
  auto* cost = app.add_subcommand("cost-model", "Modeled centralized vs distributed cost");
  auto* widths_opt = cost->add_option("--widths", cost_widths)->delimiter(',');
  cost->add_option("--sites", cost_sites)->excludes(widths_opt);
  cost->add_option("--gamma", cost_gamma, "Columns per site")->excludes(widths_opt);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--rows", gen_args.rows)->required();
  gen->add_option("--cols", gen_args.cols)->required();
  gen->add_option("--seed", gen_args.seed)->required();
  gen->add_option("--out", gen_args.out, "Single table (.csv or whitespace)");
  gen->add_option("--preset", gen_args.preset, "Split into per-site tables, mfeat-2 .. mfeat-6");
  gen->add_option("--out-dir", gen_args.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*schedule) return cmd_schedule(schedule_sites, schedule_json);
    if (*run) return cmd_run(run_args);
    if (*compare) return cmd_compare(cmp_args);
    if (*cost) return cmd_cost_model(cost_widths, cost_sites, cost_gamma);
    if (*gen) return cmd_gen(gen_args);
  } catch (const CliFailure& f) {
    std::cerr << "dcm: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "dcm: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
