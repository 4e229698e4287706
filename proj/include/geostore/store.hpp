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

#ifndef GEOSTORE_STORE_HPP_
#define GEOSTORE_STORE_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geostore/model.hpp"

namespace geostore {

/// One stored chunk. Content and parents never change after put().
struct StoredEntry {
  ChunkId id;
  std::string content;
  std::shared_ptr<const Parents> parents;
  ChunkMetadata metadata;
  std::uint64_t sequence = 0;
};

/// Chunk persistence. Implementations are thread-safe; operations on one id
/// are linearizable.
///
/// Parents are kept once per import (keyed by `metadata.import_id`): the
/// first put() of an import records them, later puts of the same import
/// reuse that record.
class ChunkStore {
 public:
  virtual ~ChunkStore() = default;

  /// Throws Error(kDuplicateId) or Error(kIoError).
  virtual void put(const StoredEntry& entry) = 0;
  /// Throws Error(kNotFound).
  virtual StoredEntry get(const ChunkId& id) const = 0;
  /// Metadata only; throws Error(kNotFound).
  virtual ChunkMetadata get_metadata(const ChunkId& id) const = 0;
  /// Idempotent; returns the number of entries removed.
  virtual std::size_t remove(const std::vector<ChunkId>& ids) = 0;
  /// Throws Error(kNotFound). Returns whether anything changed.
  virtual bool update_metadata(const ChunkId& id, const MetadataDelta& delta) = 0;
  /// Every stored id once, in no particular order.
  virtual void scan(const std::function<void(const ChunkId&)>& visit) const = 0;
  virtual std::size_t size() const = 0;
  /// Parents recorded for an import, or nullptr.
  virtual std::shared_ptr<const Parents> get_parents(const std::string& import_id) const = 0;

  /// Marks an import as in progress until end_import(); imports still
  /// marked after a crash are rolled back by reconciliation.
  virtual void begin_import(const std::string& import_id) = 0;
  virtual void end_import(const std::string& import_id) = 0;
  virtual std::vector<std::string> pending_imports() const = 0;

  /// Makes completed writes durable.
  virtual void sync() = 0;
};

/// Volatile backend.
std::unique_ptr<ChunkStore> make_memory_store();

/// Directory backend:
///
///   <root>/store/<layer segments>/<id>.chunk   raw content
///   <root>/store/<layer segments>/<id>.meta    "v1" sidecar
///   <root>/parents/<import id>                 "v1" parents record
///   <root>/imports/<import id>                 in-progress marker
///
/// Every file is written to a temporary name and renamed into place; an
/// entry exists once its sidecar exists. With `sync_each_write` every write
/// is fsynced, otherwise durability comes from sync().
std::unique_ptr<ChunkStore> make_filesystem_store(const std::filesystem::path& root,
                                                  bool sync_each_write = false);

struct StoreConfig {
  std::string backend = "memory";  // "memory" or "filesystem"
  std::filesystem::path path;
  bool sync_each_write = false;
};

/// Throws Error(kInvalidArgument) for an unknown backend.
std::unique_ptr<ChunkStore> make_store(const StoreConfig& config);

/// Percent-encoding used in sidecars: `%`, bytes up to 0x20 and 0x7F.
std::string percent_encode(std::string_view raw);
/// Throws Error(kIoError) on a malformed escape.
std::string percent_decode(std::string_view encoded);

}  // namespace geostore

#endif  // GEOSTORE_STORE_HPP_
