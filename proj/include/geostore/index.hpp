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

#ifndef GEOSTORE_INDEX_HPP_
#define GEOSTORE_INDEX_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geostore/document.hpp"
#include "geostore/model.hpp"
#include "geostore/query.hpp"

namespace geostore {

/// A query hit plus what the merger needs to locate its parents.
struct DocRef {
  ChunkId id;
  std::string import_id;
  Format format = Format::kXml;
};

struct IndexOptions {
  // Number of committed segments that triggers a compaction.
  std::size_t compact_after_segments = 64;
  // fsync segments and manifest on commit.
  bool sync = true;
};

/// Embedded inverted + spatial index over IndexDocuments.
///
/// Thread-safe: readers run concurrently and only ever see fully applied
/// batches; writers are serialized. When opened on a directory every write is
/// committed to an append-only segment log before it becomes visible:
///
///   <dir>/manifest          "GEOSTORE-INDEX 1" + one JSON line per segment
///   <dir>/segments/<n>.seg  "GEOSTORE-SEG 1" + one JSON record per line
class Index {
 public:
  /// Volatile index.
  Index();
  /// Persistent index rooted at `dir` (created if missing).
  explicit Index(const std::filesystem::path& dir, IndexOptions options = {});
  ~Index();

  Index(const Index&) = delete;
  Index& operator=(const Index&) = delete;

  /// All-or-nothing. Throws Error(kDuplicateId) if any id is already present
  /// or repeated within the batch.
  std::size_t add(std::vector<IndexDocument> docs);

  /// Ids of live documents matching `query` inside the layer subtree, in
  /// export order.
  std::vector<ChunkId> query(const query::Node& query,
                             const LayerPath& layer = LayerPath()) const;

  std::vector<DocRef> query_refs(const query::Node& query,
                                 const LayerPath& layer = LayerPath()) const;

  /// Distinct (layer, format) pairs of live documents.
  std::vector<std::pair<LayerPath, Format>> layer_formats() const;

  /// All-or-nothing. Throws Error(kUnknownId) if any id is missing. Returns
  /// the number of documents whose metadata actually changed.
  std::size_t update_metadata(const std::vector<ChunkId>& ids,
                              const MetadataDelta& delta);

  /// Unknown ids are ignored. Returns the number removed.
  std::size_t remove(const std::vector<ChunkId>& ids);

  std::optional<IndexDocument> get(const ChunkId& id) const;
  bool contains(const ChunkId& id) const;
  std::size_t size() const;
  std::vector<ChunkId> ids() const;

  /// Raw spatial candidates for `box` before exact filtering.
  std::vector<ChunkId> bbox_candidates(const BoundingBox& box) const;

  /// Rewrites the log as a single snapshot segment.
  void compact();
  std::size_t segment_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geostore

#endif  // GEOSTORE_INDEX_HPP_
