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

#include "dcm/dcm.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "dcm/costmodel.hpp"
#include "dcm/error.hpp"
#include "dcm/ingest.hpp"
#include "dcm/report.hpp"
#include "dcm/runtime.hpp"
#include "dcm/schedule.hpp"

struct dcm_matrix_s {
  dcm::DenseMatrix m;
};

struct dcm_partition_s {
  dcm::PartitionSpec spec;
};

struct dcm_result_s {
  dcm::RunResult result;
  dcm::ReportContext ctx;
  std::size_t partitions = 0;
};

namespace {

thread_local std::string last_error;

dcm_status to_status(dcm::ErrorCode code) {
  using dcm::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return DCM_E_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return DCM_E_DIMENSION_MISMATCH;
    case ErrorCode::NonFiniteValue: return DCM_E_NON_FINITE_VALUE;
    case ErrorCode::DuplicateLabel: return DCM_E_DUPLICATE_LABEL;
    case ErrorCode::IndexOutOfRange: return DCM_E_INDEX_OUT_OF_RANGE;
    case ErrorCode::EmptyMatrix: return DCM_E_EMPTY_MATRIX;
    case ErrorCode::DuplicateIndex: return DCM_E_DUPLICATE_INDEX;
    case ErrorCode::LengthMismatch: return DCM_E_LENGTH_MISMATCH;
    case ErrorCode::TooFewRows: return DCM_E_TOO_FEW_ROWS;
    case ErrorCode::RowCountMismatch: return DCM_E_ROW_COUNT_MISMATCH;
    case ErrorCode::SameSite: return DCM_E_SAME_SITE;
    case ErrorCode::MissingPair: return DCM_E_MISSING_PAIR;
    case ErrorCode::OverlappingPair: return DCM_E_OVERLAPPING_PAIR;
    case ErrorCode::NonConvergence: return DCM_E_NON_CONVERGENCE;
    case ErrorCode::IoError: return DCM_E_IO;
    case ErrorCode::RaggedRows: return DCM_E_RAGGED_ROWS;
    case ErrorCode::ParseError: return DCM_E_PARSE;
    case ErrorCode::SpecMismatch: return DCM_E_SPEC_MISMATCH;
    case ErrorCode::UnsupportedPartitionCount: return DCM_E_UNSUPPORTED_PARTITION_COUNT;
    case ErrorCode::WidthMismatch: return DCM_E_WIDTH_MISMATCH;
    case ErrorCode::MalformedFrame: return DCM_E_MALFORMED_FRAME;
    case ErrorCode::UnknownKind: return DCM_E_UNKNOWN_KIND;
    case ErrorCode::TransportError: return DCM_E_TRANSPORT;
    case ErrorCode::TimeoutError: return DCM_E_TIMEOUT;
    case ErrorCode::ProtocolError: return DCM_E_PROTOCOL;
    case ErrorCode::Mismatch: return DCM_E_MISMATCH;
  }
  return DCM_E_INTERNAL;
}

dcm_status set_error(dcm_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
dcm_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const dcm::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DCM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DCM_E_INTERNAL, e.what());
  }
}

dcm_status null_argument(const char* name) {
  return set_error(DCM_E_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dcm::TableFormat table_format(dcm_format format, const char* path) {
  switch (format) {
    case DCM_FORMAT_CSV: return dcm::TableFormat::Csv;
    case DCM_FORMAT_WHITESPACE: return dcm::TableFormat::Whitespace;
    default: return dcm::format_for(path);
  }
}

dcm::RunOptions run_options(const dcm_run_options* options, std::size_t sites) {
  dcm_run_options defaults;
  dcm_run_options_init(&defaults);
  const dcm_run_options& o = options ? *options : defaults;

  dcm::RunOptions out;
  out.transport =
      o.transport == DCM_TRANSPORT_TCP ? dcm::TransportKind::Tcp : dcm::TransportKind::InProcess;
  out.deadline = std::chrono::milliseconds(o.deadline_ms == 0 ? 60'000 : o.deadline_ms);
  out.compute_eigen = o.skip_eigen == 0;
  if (o.inject_corruption && sites > 0) {
    const dcm::SiteId last = sites - 1;
    out.corrupt_cov_block = [last](dcm::CovBlock& b) {
      if (b.site_a != last || b.site_b != last || b.block.empty()) return;
      b.block(0, 0) = std::nextafter(b.block(0, 0), INFINITY);
    };
  }
  return out;
}

std::vector<std::string> site_names(const dcm::PartitionSpec& spec) {
  std::vector<std::string> names;
  for (const auto& g : spec.groups) names.push_back(g.name);
  return names;
}

}  // namespace

extern "C" {

const char* dcm_version(void) { return "1.0.0"; }

const char* dcm_last_error(void) { return last_error.c_str(); }

const char* dcm_status_name(dcm_status status) {
  switch (status) {
    case DCM_OK: return "OK";
    case DCM_E_INTERNAL: return "InternalError";
    case DCM_E_INVALID_ARGUMENT: return "InvalidArgument";
    default: break;
  }
  for (int c = 0; c <= static_cast<int>(dcm::ErrorCode::Mismatch); ++c) {
    const auto code = static_cast<dcm::ErrorCode>(c);
    if (to_status(code) == status) return dcm::to_string(code).data();
  }
  return "Unknown";
}

void dcm_string_free(char* s) { std::free(s); }

dcm_status dcm_matrix_create(size_t rows, size_t cols, const double* values,
                             const char* const* labels, dcm_matrix_t* out) {
  if (!out) return null_argument("out");
  if (!values && rows * cols > 0) return null_argument("values");
  return guarded([&] {
    std::optional<dcm::Labels> names;
    if (labels) {
      names.emplace();
      for (size_t c = 0; c < cols; ++c) {
        if (!labels[c]) return null_argument("labels[i]");
        names->emplace_back(labels[c]);
      }
    }
    std::vector<double> v(values, values + rows * cols);
    *out = new dcm_matrix_s{dcm::DenseMatrix(rows, cols, std::move(v), std::move(names))};
    return DCM_OK;
  });
}

dcm_status dcm_matrix_load(const char* path, dcm_format format, dcm_matrix_t* out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new dcm_matrix_s{dcm::load_table(path, table_format(format, path))};
    return DCM_OK;
  });
}

dcm_status dcm_matrix_save(dcm_matrix_t m, const char* path, dcm_format format) {
  if (!m) return null_argument("m");
  if (!path) return null_argument("path");
  return guarded([&] {
    dcm::save_table(m->m, path, table_format(format, path));
    return DCM_OK;
  });
}

dcm_status dcm_matrix_generate(size_t rows, size_t cols, uint64_t seed, dcm_matrix_t* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new dcm_matrix_s{dcm::generate_synthetic(rows, cols, seed)};
    return DCM_OK;
  });
}

dcm_status dcm_matrix_hjoin(const dcm_matrix_t* tables, size_t count, dcm_matrix_t* out) {
  if (!tables && count > 0) return null_argument("tables");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<dcm::DenseMatrix> parts;
    for (size_t i = 0; i < count; ++i) {
      if (!tables[i]) return null_argument("tables[i]");
      parts.push_back(tables[i]->m);
    }
    *out = new dcm_matrix_s{dcm::hjoin(parts)};
    return DCM_OK;
  });
}

dcm_status dcm_matrix_slice(dcm_matrix_t m, const size_t* cols, size_t count, dcm_matrix_t* out) {
  if (!m) return null_argument("m");
  if (!cols && count > 0) return null_argument("cols");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new dcm_matrix_s{dcm::column_slice(m->m, std::span<const size_t>(cols, count))};
    return DCM_OK;
  });
}

size_t dcm_matrix_rows(dcm_matrix_t m) { return m ? m->m.rows() : 0; }

size_t dcm_matrix_cols(dcm_matrix_t m) { return m ? m->m.cols() : 0; }

dcm_status dcm_matrix_values(dcm_matrix_t m, double* out, size_t capacity) {
  if (!m) return null_argument("m");
  const auto values = m->m.values();
  if (capacity < values.size()) {
    return set_error(DCM_E_LENGTH_MISMATCH, "buffer holds " + std::to_string(capacity) +
                                                " values, need " + std::to_string(values.size()));
  }
  if (!out && !values.empty()) return null_argument("out");
  std::copy(values.begin(), values.end(), out);
  return DCM_OK;
}

dcm_status dcm_matrix_column_mean(dcm_matrix_t m, size_t col, double* out) {
  if (!m) return null_argument("m");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = dcm::column_mean(m->m, col);
    return DCM_OK;
  });
}

void dcm_matrix_free(dcm_matrix_t m) { delete m; }

dcm_status dcm_partition_mfeat(size_t partitions, dcm_partition_t* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new dcm_partition_s{dcm::mfeat_preset(partitions)};
    return DCM_OK;
  });
}

dcm_status dcm_partition_from_widths(const size_t* widths, size_t count, dcm_partition_t* out) {
  if (!widths && count > 0) return null_argument("widths");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto spec = dcm::contiguous_spec(std::span<const size_t>(widths, count));
    spec.validate();
    *out = new dcm_partition_s{std::move(spec)};
    return DCM_OK;
  });
}

dcm_status dcm_partition_from_json(const char* json, dcm_partition_t* out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new dcm_partition_s{dcm::PartitionSpec::from_json(json)};
    return DCM_OK;
  });
}

dcm_status dcm_partition_to_json(dcm_partition_t p, char** out) {
  if (!p) return null_argument("p");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = copy_string(p->spec.to_json());
    return DCM_OK;
  });
}

size_t dcm_partition_sites(dcm_partition_t p) { return p ? p->spec.sites() : 0; }

size_t dcm_partition_total_cols(dcm_partition_t p) { return p ? p->spec.total_cols : 0; }

dcm_status dcm_partition_write_tables(dcm_partition_t p, dcm_matrix_t m, const char* dir) {
  if (!p) return null_argument("p");
  if (!m) return null_argument("m");
  if (!dir) return null_argument("dir");
  return guarded([&] {
    const auto blocks = dcm::partition_vertical(m->m, p->spec);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) return set_error(DCM_E_IO, "cannot create '" + std::string(dir) + "': " + ec.message());
    for (const auto& b : blocks) {
      std::string name = p->spec.groups[b.site].name;
      if (name.empty()) name = "site" + std::to_string(b.site);
      dcm::save_table(b.data, std::filesystem::path(dir) / (name + ".txt"),
                      dcm::TableFormat::Whitespace);
    }
    return DCM_OK;
  });
}

void dcm_partition_free(dcm_partition_t p) { delete p; }

dcm_status dcm_schedule_json(size_t sites, char** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto s = dcm::build_schedule(sites);
    *out = copy_string(dcm::schedule_json(s, dcm::validate_schedule(s)));
    return DCM_OK;
  });
}

dcm_status dcm_schedule_text(size_t sites, char** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto s = dcm::build_schedule(sites);
    *out = copy_string(dcm::schedule_text(s, dcm::validate_schedule(s)));
    return DCM_OK;
  });
}

dcm_status dcm_cost_model_json(const size_t* widths, size_t count, char** out) {
  if (!widths && count > 0) return null_argument("widths");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (count == 0) return set_error(DCM_E_INVALID_ARGUMENT, "cost model needs at least one site");
    const std::span<const size_t> w(widths, count);
    const auto report = dcm::distributed_cost(w, dcm::build_schedule(count));
    *out = copy_string(dcm::cost_report_json(report, w));
    return DCM_OK;
  });
}

void dcm_run_options_init(dcm_run_options* options) {
  if (!options) return;
  options->transport = DCM_TRANSPORT_IN_PROCESS;
  options->deadline_ms = 0;
  options->skip_eigen = 0;
  options->inject_corruption = 0;
}

dcm_status dcm_run(dcm_matrix_t data, dcm_partition_t spec, dcm_mode mode,
                   const dcm_run_options* options, dcm_result_t* out) {
  if (!data) return null_argument("data");
  if (!spec) return null_argument("spec");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto blocks = dcm::partition_vertical(data->m, spec->spec);
    const auto opts = run_options(options, blocks.size());
    auto r = std::make_unique<dcm_result_s>();
    r->partitions = blocks.size();
    r->ctx.transport = opts.transport;
    r->ctx.site_names = site_names(spec->spec);
    if (mode == DCM_MODE_CENTRALIZED) {
      r->ctx.mode = dcm::RunMode::Centralized;
      r->result = dcm::run_centralized(blocks, opts);
    } else {
      r->ctx.mode = dcm::RunMode::Distributed;
      r->result = dcm::run_distributed(blocks, dcm::build_schedule(blocks.size()), opts);
    }
    *out = r.release();
    return DCM_OK;
  });
}

dcm_status dcm_result_report_json(dcm_result_t r, char** out) {
  if (!r) return null_argument("r");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = copy_string(dcm::run_report_json(r->result, r->ctx, r->partitions));
    return DCM_OK;
  });
}

dcm_status dcm_result_checksum(dcm_result_t r, char out[65]) {
  if (!r) return null_argument("r");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto hex = dcm::matrix_checksum(r->result.covariance.matrix);
    std::memcpy(out, hex.c_str(), hex.size() + 1);
    return DCM_OK;
  });
}

size_t dcm_result_dim(dcm_result_t r) { return r ? r->result.covariance.dim() : 0; }

dcm_status dcm_result_covariance(dcm_result_t r, double* out, size_t capacity) {
  if (!r) return null_argument("r");
  const auto values = r->result.covariance.matrix.values();
  if (capacity < values.size()) {
    return set_error(DCM_E_LENGTH_MISMATCH, "buffer holds " + std::to_string(capacity) +
                                                " values, need " + std::to_string(values.size()));
  }
  if (!out) return null_argument("out");
  std::copy(values.begin(), values.end(), out);
  return DCM_OK;
}

dcm_status dcm_result_eigenvalues(dcm_result_t r, double* out, size_t capacity) {
  if (!r) return null_argument("r");
  if (!r->result.eigen) return set_error(DCM_E_INVALID_ARGUMENT, "eigen-decomposition was skipped");
  const auto& ev = r->result.eigen->eigenvalues;
  if (capacity < ev.size()) {
    return set_error(DCM_E_LENGTH_MISMATCH, "buffer holds " + std::to_string(capacity) +
                                                " values, need " + std::to_string(ev.size()));
  }
  if (!out) return null_argument("out");
  std::copy(ev.begin(), ev.end(), out);
  return DCM_OK;
}

dcm_status dcm_result_dump_matrix(dcm_result_t r, const char* path) {
  if (!r) return null_argument("r");
  if (!path) return null_argument("path");
  return guarded([&] {
    dcm::dump_matrix(r->result.covariance.matrix, path);
    return DCM_OK;
  });
}

dcm_status dcm_result_equal(dcm_result_t a, dcm_result_t b, int* equal) {
  if (!a || !b) return null_argument("a/b");
  if (!equal) return null_argument("equal");
  *equal = dcm::bit_equal(a->result.covariance.matrix, b->result.covariance.matrix) ? 1 : 0;
  return DCM_OK;
}

void dcm_result_free(dcm_result_t r) { delete r; }

dcm_status dcm_compare(dcm_matrix_t data, dcm_partition_t spec, const dcm_run_options* options,
                       char** out) {
  if (!data) return null_argument("data");
  if (!spec) return null_argument("spec");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto blocks = dcm::partition_vertical(data->m, spec->spec);
    const auto c = dcm::compare_modes(blocks, run_options(options, blocks.size()), site_names(spec->spec));
    *out = copy_string(c.json);
    if (!c.equal) {
      return set_error(DCM_E_MISMATCH, "centralized " + c.centralized_checksum +
                                           " != distributed " + c.distributed_checksum);
    }
    return DCM_OK;
  });
}

}  // extern "C"
