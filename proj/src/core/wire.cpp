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

#include "dcm/wire.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "dcm/error.hpp"

namespace dcm {

namespace {

constexpr std::uint8_t kMagic[4] = {'D', 'C', 'M', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, ErrorCode overrun) : in_(in), overrun_(overrun) {}

  std::uint8_t u8() { return need(1)[0]; }
  std::uint32_t u32() {
    const auto b = need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> need(std::size_t n) {
    if (remaining() < n) {
      fail(overrun_, "needed " + std::to_string(n) + " more bytes, " +
                         std::to_string(remaining()) + " left");
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  ErrorCode overrun_;
};

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) fail(ErrorCode::InvalidArgument, std::string(what) + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

void write_matrix_values(Writer& w, const DenseMatrix& m) {
  for (double v : m.values()) w.f64(v);
}

// rows * cols values of 8 bytes must fit in what is left of the payload.
DenseMatrix read_matrix_values(Reader& r, std::uint32_t rows, std::uint32_t cols) {
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  if (count > r.remaining() / 8) {
    fail(ErrorCode::LengthMismatch, std::to_string(rows) + "x" + std::to_string(cols) +
                                        " values do not fit the payload");
  }
  std::vector<double> values(count);
  for (auto& v : values) v = r.f64();
  return DenseMatrix(rows, cols, std::move(values));
}

std::vector<std::size_t> read_indices(Reader& r, std::uint32_t count) {
  if (count > r.remaining() / 4) {
    fail(ErrorCode::LengthMismatch, std::to_string(count) + " indices do not fit the payload");
  }
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = r.u32();
  return out;
}

MessageKind checked_kind(std::uint8_t raw) {
  if (raw < 1 || raw > 3) fail(ErrorCode::UnknownKind, "kind byte " + std::to_string(raw));
  return static_cast<MessageKind>(raw);
}

}  // namespace

ProtocolMessage ProtocolMessage::data(std::uint32_t sender, std::uint32_t receiver,
                                      ColumnBlock block) {
  return {MessageKind::DataBlock, sender, receiver, std::move(block)};
}

ProtocolMessage ProtocolMessage::cov(std::uint32_t sender, std::uint32_t receiver,
                                     CovBlock block) {
  return {MessageKind::CovBlockMsg, sender, receiver, std::move(block)};
}

ProtocolMessage ProtocolMessage::done(std::uint32_t sender, std::uint32_t receiver) {
  return {MessageKind::Done, sender, receiver, std::monostate{}};
}

std::size_t data_payload_size(const ColumnBlock& block) noexcept {
  return 12 + 4 * block.global_cols.size() + 8 * block.data.values().size();
}

std::vector<std::uint8_t> encode_message(const ProtocolMessage& msg) {
  Writer payload;
  switch (msg.kind) {
    case MessageKind::DataBlock: {
      const auto& b = std::get<ColumnBlock>(msg.payload);
      if (b.global_cols.size() != b.data.cols()) {
        fail(ErrorCode::DimensionMismatch, "data block index count disagrees with its width");
      }
      payload.u32(narrow(b.site, "site"));
      payload.u32(narrow(b.data.rows(), "rows"));
      payload.u32(narrow(b.data.cols(), "cols"));
      for (std::size_t g : b.global_cols) payload.u32(narrow(g, "global column"));
      write_matrix_values(payload, b.data);
      break;
    }
    case MessageKind::CovBlockMsg: {
      const auto& b = std::get<CovBlock>(msg.payload);
      if (b.rows_global_cols.size() != b.block.rows() ||
          b.cols_global_cols.size() != b.block.cols()) {
        fail(ErrorCode::DimensionMismatch, "covariance block indices disagree with its shape");
      }
      payload.u32(narrow(b.site_a, "site_a"));
      payload.u32(narrow(b.site_b, "site_b"));
      payload.u32(narrow(b.block.rows(), "rows"));
      payload.u32(narrow(b.block.cols(), "cols"));
      for (std::size_t g : b.rows_global_cols) payload.u32(narrow(g, "global column"));
      for (std::size_t g : b.cols_global_cols) payload.u32(narrow(g, "global column"));
      write_matrix_values(payload, b.block);
      break;
    }
    case MessageKind::Done:
      break;
    default:
      fail(ErrorCode::UnknownKind,
           "kind byte " + std::to_string(static_cast<unsigned>(msg.kind)));
  }

  const auto body = payload.take();
  Writer frame;
  frame.bytes(kMagic);
  frame.u8(static_cast<std::uint8_t>(msg.kind));
  frame.u32(msg.sender);
  frame.u32(msg.receiver);
  frame.u64(body.size());
  frame.bytes(body);
  return frame.take();
}

std::uint64_t frame_payload_length(std::span<const std::uint8_t> header) {
  if (header.size() < kFrameHeaderSize) {
    fail(ErrorCode::MalformedFrame, "frame header needs " + std::to_string(kFrameHeaderSize) +
                                        " bytes, got " + std::to_string(header.size()));
  }
  if (std::memcmp(header.data(), kMagic, 4) != 0) fail(ErrorCode::MalformedFrame, "bad magic");
  Reader r(header.subspan(4, kFrameHeaderSize - 4), ErrorCode::MalformedFrame);
  checked_kind(r.u8());
  r.u32();
  r.u32();
  return r.u64();
}

ProtocolMessage decode_message(std::span<const std::uint8_t> bytes) {
  const std::uint64_t length = frame_payload_length(bytes);
  const std::size_t available = bytes.size() - kFrameHeaderSize;
  if (available < length) {
    fail(ErrorCode::MalformedFrame, "truncated payload: " + std::to_string(available) + " of " +
                                        std::to_string(length) + " bytes");
  }
  if (available > length) {
    fail(ErrorCode::LengthMismatch, std::to_string(available - length) +
                                        " bytes beyond the declared payload");
  }

  Reader header(bytes.subspan(4, kFrameHeaderSize - 4), ErrorCode::MalformedFrame);
  ProtocolMessage msg;
  msg.kind = checked_kind(header.u8());
  msg.sender = header.u32();
  msg.receiver = header.u32();

  Reader r(bytes.subspan(kFrameHeaderSize), ErrorCode::LengthMismatch);
  switch (msg.kind) {
    case MessageKind::DataBlock: {
      ColumnBlock b;
      b.site = r.u32();
      const std::uint32_t rows = r.u32();
      const std::uint32_t cols = r.u32();
      b.global_cols = read_indices(r, cols);
      b.data = read_matrix_values(r, rows, cols);
      msg.payload = std::move(b);
      break;
    }
    case MessageKind::CovBlockMsg: {
      CovBlock b;
      b.site_a = r.u32();
      b.site_b = r.u32();
      const std::uint32_t rows = r.u32();
      const std::uint32_t cols = r.u32();
      b.rows_global_cols = read_indices(r, rows);
      b.cols_global_cols = read_indices(r, cols);
      b.block = read_matrix_values(r, rows, cols);
      msg.payload = std::move(b);
      break;
    }
    case MessageKind::Done:
      break;
  }
  if (r.remaining() != 0) {
    fail(ErrorCode::LengthMismatch,
         std::to_string(r.remaining()) + " unread payload bytes after the last field");
  }
  return msg;
}

}  // namespace dcm
