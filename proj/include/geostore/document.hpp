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

#ifndef GEOSTORE_DOCUMENT_HPP_
#define GEOSTORE_DOCUMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geostore/model.hpp"

namespace geostore {

/// A key/value pair found in chunk content during indexing. Never supplied
/// by users and never changed after indexing.
struct IndexedAttribute {
  std::string key;
  TypedValue value;

  bool operator==(const IndexedAttribute&) const = default;
};

/// Searchable projection of one chunk. Only `metadata` changes after the
/// document is added to an index.
struct IndexDocument {
  ChunkId chunk_id;
  std::uint64_t sequence = 0;
  std::optional<BoundingBox> bbox;
  std::vector<IndexedAttribute> attributes;
  // Sorted, unique, lowercased.
  std::vector<std::string> tokens;
  ChunkMetadata metadata;

  bool has_token(std::string_view token) const;

  bool operator==(const IndexDocument&) const = default;
};

/// Export order: import time, then position in the source file, then id.
inline bool export_order_less(const IndexDocument& a, const IndexDocument& b) {
  if (a.metadata.import_timestamp != b.metadata.import_timestamp) {
    return a.metadata.import_timestamp < b.metadata.import_timestamp;
  }
  if (a.sequence != b.sequence) return a.sequence < b.sequence;
  return a.chunk_id < b.chunk_id;
}

}  // namespace geostore

#endif  // GEOSTORE_DOCUMENT_HPP_
