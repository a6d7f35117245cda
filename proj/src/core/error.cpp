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

#include "dcm/error.hpp"

namespace dcm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::SameSite: return "SameSite";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::OverlappingPair: return "OverlappingPair";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::UnsupportedPartitionCount: return "UnsupportedPartitionCount";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::MalformedFrame: return "MalformedFrame";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::TimeoutError: return "TimeoutError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::Mismatch: return "Mismatch";
  }
  return "Unknown";
}

}  // namespace dcm
