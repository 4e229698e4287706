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


#ifndef GEOSTORE_ENGINE_HPP_
#define GEOSTORE_ENGINE_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geostore/error.hpp"
#include "geostore/index.hpp"
#include "geostore/model.hpp"
#include "geostore/store.hpp"

namespace geostore {

class IndexWorker;

namespace detail {
struct ImportTask;
}  // namespace detail

enum class TaskState { kAccepted, kSplitting, kIndexing, kFinished, kFailed };

std::string_view to_string(TaskState state);

struct TaskSnapshot {
  std::string id;
  TaskState state = TaskState::kAccepted;
  std::uint64_t chunks_written = 0;
  std::uint64_t chunks_indexed = 0;
  std::optional<std::string> error;
  std::optional<ErrorCode> error_code;
  std::optional<std::uint64_t> error_offset;
  LayerPath layer;
  std::int64_t started_at = 0;
  std::optional<std::int64_t> ended_at;
  std::uint64_t bytes_received = 0;
  std::size_t peak_buffered_bytes = 0;
  std::size_t max_chunk_bytes = 0;
  // Every state the task has been in, oldest first.
  std::vector<TaskState> history;

  bool terminal() const noexcept {
    return state == TaskState::kFinished || state == TaskState::kFailed;
  }
};

struct ImportOptions {
  LayerPath layer;
  std::set<std::string> tags;
  std::map<std::string, std::string> properties;
  // Used for chunks whose content carries no CRS of its own.
  std::optional<std::string> fallback_crs;
};

struct EngineConfig {
  StoreConfig store;
  // Volatile index when unset.
  std::optional<std::filesystem::path> index_path;
  IndexOptions index_options;
  std::chrono::milliseconds task_retention = std::chrono::hours(1);
  std::size_t max_pending_index_jobs = 4096;
  std::size_t index_batch_size = 256;
  bool reconcile_on_start = true;
};

struct ReconcileReport {
  std::size_t rolled_back_imports = 0;
  std::size_t rolled_back_chunks = 0;
  std::size_t dropped_index_entries = 0;
  std::size_t reindexed = 0;
};

class Engine;

/// One streaming import. Errors raised by feed()/finish() have already
/// failed the task and rolled back its chunks.
class ImportSession {
 public:
  ~ImportSession();
  ImportSession(const ImportSession&) = delete;
  ImportSession& operator=(const ImportSession&) = delete;

  const std::string& task_id() const noexcept;
  void feed(std::string_view data);
  /// Ends splitting; indexing continues in the background.
  void finish();
  /// Fails the task (client went away, decoding error, ...).
  void abort(const std::string& reason);

 private:
  friend class Engine;
  struct State;
  explicit ImportSession(std::unique_ptr<State> state);
  std::unique_ptr<State> state_;
};

/// Snapshot of a search. Chunks deleted before they are streamed are
/// skipped.
class SearchResult {
 public:
  using Sink = std::function<bool(std::string_view)>;

  Format format() const noexcept { return format_; }
  std::string_view content_type() const noexcept;
  std::size_t hits() const noexcept { return refs_.size(); }
  /// Streams the merged document; stops when `sink` returns false. Returns
  /// false in that case. Store IO errors propagate.
  bool write(const Sink& sink) const;
  std::string to_string() const;

 private:
  friend class Engine;
  const ChunkStore* store_ = nullptr;
  Format format_ = Format::kXml;
  std::optional<Parents> parents_;
  std::vector<DocRef> refs_;
};

class Engine {
 public:
  explicit Engine(EngineConfig config = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  std::unique_ptr<ImportSession> begin_import(ImportOptions options);
  /// Imports a complete document; returns the task id. Throws on split
  /// errors like ImportSession.
  std::string import_document(std::string_view body, ImportOptions options);

  /// Throws Error(kParseError), Error(kIncompatibleParents), or
  /// Error(kNotFound) for a layer that never held chunks.
  SearchResult search(std::string_view query_text, const LayerPath& layer) const;

  /// An empty query needs `all`; otherwise Error(kInvalidArgument).
  std::size_t remove(std::string_view query_text, const LayerPath& layer, bool all);

  /// Returns the number of chunks whose metadata changed.
  std::size_t update_metadata(std::string_view query_text, const LayerPath& layer,
                              const MetadataDelta& delta);

  std::optional<TaskSnapshot> task(const std::string& id) const;
  std::size_t task_count() const;
  /// Polls until the task is terminal or `timeout` passes.
  std::optional<TaskSnapshot> wait_for_task(const std::string& id,
                                            std::chrono::milliseconds timeout) const;

  /// Rolls back interrupted imports, drops index entries without chunks and
  /// indexes chunks without entries.
  ReconcileReport reconcile();
  const ReconcileReport& startup_report() const noexcept { return startup_report_; }

  /// Blocks until queued indexing work has run.
  void wait_idle();
  /// Hook run before each indexing job.
  void set_index_throttle(std::function<void()> throttle);

  ChunkStore& store() noexcept { return *store_; }
  Index& index() noexcept { return *index_; }
  const EngineConfig& config() const noexcept { return config_; }

 private:
  friend class ImportSession;
  using Task = detail::ImportTask;

  std::shared_ptr<Task> new_task(const ImportOptions& options, std::int64_t now);
  void prune_tasks(std::int64_t now) const;
  // Waits for queue space instead of failing; import backpressure.
  void submit_index_job(std::function<void(Index&)> job);
  // Records the layer and its ancestors; `format` adds to the set of
  // formats seen below each of them.
  void note_layer(const LayerPath& layer, std::optional<Format> format = std::nullopt);
  // Formats seen in the layer subtree as a bit mask, or nullopt for a layer
  // that never held chunks.
  std::optional<unsigned> layer_formats(const LayerPath& layer) const;

  EngineConfig config_;
  std::unique_ptr<ChunkStore> store_;
  std::unique_ptr<Index> index_;
  std::unique_ptr<IndexWorker> worker_;
  ReconcileReport startup_report_;

  mutable std::mutex tasks_mu_;
  mutable std::map<std::string, std::shared_ptr<Task>> tasks_;

  mutable std::mutex layers_mu_;
  std::map<LayerPath, unsigned> layers_;
};

}  // namespace geostore

#endif  // GEOSTORE_ENGINE_HPP_
