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

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dcm/covariance.hpp"

namespace dcm {

enum class MessageKind : std::uint8_t {
  DataBlock = 1,
  CovBlockMsg = 2,
  Done = 3,
};

struct ProtocolMessage {
  MessageKind kind = MessageKind::Done;
  std::uint32_t sender = 0;
  /// Sites are 0..t-1; the coordinator is t.
  std::uint32_t receiver = 0;
  std::variant<std::monostate, ColumnBlock, CovBlock> payload;

  static ProtocolMessage data(std::uint32_t sender, std::uint32_t receiver, ColumnBlock block);
  static ProtocolMessage cov(std::uint32_t sender, std::uint32_t receiver, CovBlock block);
  static ProtocolMessage done(std::uint32_t sender, std::uint32_t receiver);
};

/// Frame layout, little-endian throughout:
///   "DCM1" | u8 kind | u32 sender | u32 receiver | u64 payload length | payload
/// DataBlock payload:   u32 site, u32 rows, u32 cols, cols x u32 global index,
///                      rows*cols binary64 row-major.
/// CovBlockMsg payload: u32 site_a, u32 site_b, u32 rows, u32 cols,
///                      rows + cols u32 global indices, rows*cols binary64.
/// Done payload: empty.
inline constexpr std::size_t kFrameHeaderSize = 21;

std::vector<std::uint8_t> encode_message(const ProtocolMessage& msg);

/// Decodes exactly one complete frame.
/// Throws MalformedFrame (bad magic, truncated header or payload, payload
/// inconsistent with its kind), UnknownKind, or LengthMismatch (bytes beyond
/// the declared payload, or a payload whose dimensions disagree with its size).
ProtocolMessage decode_message(std::span<const std::uint8_t> bytes);

/// Payload length declared by a frame header. Throws MalformedFrame or UnknownKind.
std::uint64_t frame_payload_length(std::span<const std::uint8_t> header);

/// Payload size of a DataBlock carrying `block`, without encoding it.
std::size_t data_payload_size(const ColumnBlock& block) noexcept;

}  // namespace dcm
