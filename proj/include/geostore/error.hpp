// Copyright 2026 The Geostore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOSTORE_ERROR_HPP_
#define GEOSTORE_ERROR_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geostore {

enum class ErrorCode {
  kMalformedPath,
  kParseError,
  kMalformedBbox,
  kUnsupportedFormat,
  kUnsupportedEncoding,
  kXmlMalformed,
  kJsonMalformed,
  kDuplicateId,
  kNotFound,
  kUnknownId,
  kIoError,
  kIncompatibleParents,
  kInvalidArgument,
  kOverloaded,
};

/// Upper-case wire name, e.g. "PARSE_ERROR".
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. `offset` is a byte
/// offset into whatever input was being parsed, when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::uint64_t>& offset() const noexcept {
    return offset_;
  }
  // Message without the code/offset decoration added to what().
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> offset_;
  std::string message_;
};

}  // namespace geostore

#endif  // GEOSTORE_ERROR_HPP_
