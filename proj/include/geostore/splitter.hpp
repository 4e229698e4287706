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

#ifndef GEOSTORE_SPLITTER_HPP_
#define GEOSTORE_SPLITTER_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geostore/model.hpp"

namespace geostore {

/// One feature cut out of an import, before it gets an id.
struct RawChunk {
  std::string content;
  std::shared_ptr<const Parents> parents;
  std::uint64_t sequence = 0;
  std::optional<std::string> crs_hint;
  Format format = Format::kXml;
};

struct SplitStats {
  std::uint64_t bytes_consumed = 0;
  std::uint64_t chunks = 0;
  std::size_t max_chunk_bytes = 0;
  // High-water mark of bytes held in the splitter's internal buffer.
  std::size_t peak_buffered_bytes = 0;
};

/// XML if the first non-whitespace byte (after an optional UTF-8 BOM) is `<`,
/// GeoJSON if it is `{` or `[`. Throws Error(kUnsupportedFormat) otherwise,
/// including for blank input.
Format detect_format(std::string_view prefix);

/// Push-style streaming splitter. Bytes are fed in arbitrary pieces; chunks
/// are handed to the sink as soon as they are complete. Memory use is bounded
/// by the largest chunk plus the largest fed piece.
///
/// XML: every direct child of the root element becomes a chunk.
/// GeoJSON: every element of a top-level `features` array (or of a top-level
/// array) becomes a chunk; any other document is one standalone chunk.
///
/// Errors surface from feed()/finish() as Error(kXmlMalformed /
/// kJsonMalformed / kUnsupportedEncoding) with an absolute byte offset;
/// chunks already delivered stay valid.
class Splitter {
 public:
  using Sink = std::function<void(RawChunk&&)>;

  virtual ~Splitter() = default;
  virtual void feed(std::string_view data) = 0;
  /// Signals end of input.
  virtual void finish() = 0;
  virtual std::optional<Format> format() const = 0;
  virtual const SplitStats& stats() const = 0;
};

std::unique_ptr<Splitter> make_xml_splitter(Splitter::Sink sink);
std::unique_ptr<Splitter> make_geojson_splitter(Splitter::Sink sink);
/// Picks the format from the first non-whitespace byte.
std::unique_ptr<Splitter> make_splitter(Splitter::Sink sink);

/// Splits a complete in-memory document.
std::vector<RawChunk> split(std::string_view document);

/// Splits a stream read in pieces of `piece_size` bytes.
SplitStats split_stream(std::istream& in, const Splitter::Sink& sink,
                        std::size_t piece_size = 64 * 1024);

}  // namespace geostore

#endif  // GEOSTORE_SPLITTER_HPP_
