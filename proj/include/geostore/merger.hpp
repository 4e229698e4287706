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

#ifndef GEOSTORE_MERGER_HPP_
#define GEOSTORE_MERGER_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "geostore/model.hpp"
#include "geostore/store.hpp"

namespace geostore {

/// Combines the parents of the chunks being exported. XML: the first root
/// tag with the union of all namespace declarations and attributes; a first
/// root tag that already holds the union is kept byte for byte. GeoJSON: a
/// feature collection if any input is one.
///
/// Throws Error(kIncompatibleParents) for an empty list, mixed formats,
/// different XML root local names, a prefix bound to different URIs, or an
/// attribute with conflicting values.
Parents merge_parents(const std::vector<std::shared_ptr<const Parents>>& parents);

/// Streams one output document. The header is written on construction, each
/// chunk as it arrives and the footer on finish(); nothing is buffered.
class MergeWriter {
 public:
  using Sink = std::function<void(std::string_view)>;

  MergeWriter(const Parents& parents, Sink sink);

  void write(std::string_view chunk_content);
  void finish();
  std::size_t chunks() const noexcept { return chunks_; }

 private:
  Parents parents_;
  Sink sink_;
  std::size_t chunks_ = 0;
  bool finished_ = false;
};

/// Document written when nothing matched.
std::string empty_document(Format format);

/// Merges entries already in export order.
void merge(const std::vector<StoredEntry>& entries, const MergeWriter::Sink& sink,
           Format empty_format = Format::kXml);
std::string merge_to_string(const std::vector<StoredEntry>& entries,
                            Format empty_format = Format::kXml);

std::string_view content_type(Format format);

}  // namespace geostore

#endif  // GEOSTORE_MERGER_HPP_
