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


#include "geostore/engine.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "geostore/extract.hpp"
#include "geostore/index_worker.hpp"
#include "geostore/merger.hpp"
#include "geostore/query.hpp"
#include "geostore/splitter.hpp"
#include "geostore/text.hpp"

namespace geostore {

std::string_view to_string(TaskState state) {
  switch (state) {
    case TaskState::kAccepted: return "ACCEPTED";
    case TaskState::kSplitting: return "SPLITTING";
    case TaskState::kIndexing: return "INDEXING";
    case TaskState::kFinished: return "FINISHED";
    case TaskState::kFailed: return "FAILED";
  }
  return "UNKNOWN";
}

namespace detail {

struct ImportTask {
  mutable std::mutex mu;
  TaskSnapshot snap;
  std::string import_id;
  std::vector<ChunkId> written;
  bool rolled_back = false;

  TaskSnapshot snapshot() const {
    std::lock_guard lock(mu);
    return snap;
  }

  // Moves forward only; terminal states are sticky.
  void advance(TaskState next) {
    std::lock_guard lock(mu);
    advance_locked(next);
  }

  void advance_locked(TaskState next) {
    if (snap.terminal() || next <= snap.state) return;
    snap.state = next;
    snap.history.push_back(next);
    if (snap.terminal()) snap.ended_at = now_millis();
  }

  // Marks the task failed and hands back the chunks written since the last
  // call, which the caller deletes.
  std::vector<ChunkId> fail(const std::string& message, std::optional<ErrorCode> code,
                            std::optional<std::uint64_t> offset) {
    std::lock_guard lock(mu);
    std::vector<ChunkId> doomed;
    doomed.swap(written);
    if (rolled_back) return doomed;
    rolled_back = true;
    if (snap.state != TaskState::kFinished) {
      snap.error = message;
      snap.error_code = code;
      snap.error_offset = offset;
      if (snap.state != TaskState::kFailed) {
        snap.state = TaskState::kFailed;
        snap.history.push_back(TaskState::kFailed);
        snap.ended_at = now_millis();
      }
    }
    return doomed;
  }
};

}  // namespace detail

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

std::vector<IndexDocument> load_documents(const ChunkStore& store, const Index& index,
                                          const std::vector<ChunkId>& ids) {
  std::vector<IndexDocument> docs;
  docs.reserve(ids.size());
  for (const auto& id : ids) {
    if (index.contains(id)) continue;
    StoredEntry e;
    try {
      e = store.get(id);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kNotFound) continue;
      throw;
    }
    docs.push_back(make_document(e.id, e.sequence, e.content, e.metadata));
  }
  return docs;
}

}  // namespace

// ---------------------------------------------------------------------------
// ImportSession

struct ImportSession::State {
  Engine* engine = nullptr;
  std::shared_ptr<detail::ImportTask> task;
  ImportOptions options;
  std::int64_t timestamp = 0;
  std::unique_ptr<Splitter> splitter;
  std::vector<ChunkId> batch;
  bool done = false;
  bool format_noted = false;

  void store_chunk(RawChunk&& chunk) {
    if (!format_noted) {
      engine->note_layer(options.layer, chunk.format);
      format_noted = true;
    }
    StoredEntry e;
    e.id = ChunkId::generate();
    e.content = std::move(chunk.content);
    e.parents = std::move(chunk.parents);
    e.sequence = chunk.sequence;
    e.metadata.layer = options.layer;
    e.metadata.tags = options.tags;
    e.metadata.properties = options.properties;
    e.metadata.crs = chunk.crs_hint ? chunk.crs_hint : options.fallback_crs;
    e.metadata.import_timestamp = timestamp;
    e.metadata.format = chunk.format;
    e.metadata.import_id = task->import_id;
    {
      // Recorded before the write so a partial put is rolled back too.
      std::lock_guard lock(task->mu);
      if (task->rolled_back) {
        throw Error(task->snap.error_code.value_or(ErrorCode::kIoError),
                    task->snap.error.value_or("import failed"));
      }
      task->written.push_back(e.id);
    }
    engine->store_->put(e);
    {
      std::lock_guard lock(task->mu);
      ++task->snap.chunks_written;
    }
    batch.push_back(std::move(e.id));
    if (batch.size() >= engine->config_.index_batch_size) flush();
  }

  void flush() {
    if (batch.empty()) return;
    auto ids = std::move(batch);
    batch.clear();
    auto* store = engine->store_.get();
    engine->submit_index_job([store, task = task, ids = std::move(ids)](Index& index) {
      {
        std::lock_guard lock(task->mu);
        if (task->rolled_back) return;
      }
      try {
        index.add(load_documents(*store, index, ids));
      } catch (const Error& err) {
        auto doomed = task->fail(err.message(), err.code(), err.offset());
        index.remove(doomed);
        store->remove(doomed);
        store->end_import(task->import_id);
        return;
      }
      std::lock_guard lock(task->mu);
      task->snap.chunks_indexed += ids.size();
    });
  }

  void update_stats() {
    const auto& st = splitter->stats();
    std::lock_guard lock(task->mu);
    task->snap.bytes_received = st.bytes_consumed;
    task->snap.peak_buffered_bytes = st.peak_buffered_bytes;
    task->snap.max_chunk_bytes = st.max_chunk_bytes;
  }

  void rollback(const std::string& message, std::optional<ErrorCode> code,
                std::optional<std::uint64_t> offset) {
    done = true;
    batch.clear();
    auto doomed = task->fail(message, code, offset);
    auto* store = engine->store_.get();
    const auto import_id = task->import_id;
    std::promise<void> finished;
    auto fut = finished.get_future();
    // Queued behind this import's index jobs so nothing is re-added later.
    engine->submit_index_job([&, store](Index& index) {
      try {
        index.remove(doomed);
        store->remove(doomed);
        store->end_import(import_id);
        finished.set_value();
      } catch (...) {
        finished.set_exception(std::current_exception());
      }
    });
    fut.get();
  }

  template <typename F>
  void guarded(F&& step) {
    if (done) throw Error(ErrorCode::kInvalidArgument, "import already finished");
    try {
      step();
    } catch (const Error& err) {
      rollback(err.message(), err.code(), err.offset());
      throw;
    } catch (const std::exception& err) {
      rollback(err.what(), std::nullopt, std::nullopt);
      throw;
    }
  }
};

ImportSession::ImportSession(std::unique_ptr<State> state) : state_(std::move(state)) {}

ImportSession::~ImportSession() {
  if (state_ && !state_->done) {
    try {
      abort("import abandoned");
    } catch (...) {
    }
  }
}

const std::string& ImportSession::task_id() const noexcept {
  return state_->task->snap.id;
}

void ImportSession::feed(std::string_view data) {
  state_->guarded([&] {
    state_->task->advance(TaskState::kSplitting);
    state_->splitter->feed(data);
    state_->update_stats();
  });
}

void ImportSession::finish() {
  state_->guarded([&] {
    state_->task->advance(TaskState::kSplitting);
    if (state_->splitter->stats().bytes_consumed == 0) {
      throw Error(ErrorCode::kInvalidArgument, "empty request body");
    }
    state_->splitter->finish();
    state_->update_stats();
    state_->flush();
    state_->engine->store_->sync();
    state_->engine->store_->end_import(state_->task->import_id);
    state_->task->advance(TaskState::kIndexing);
  });
  state_->done = true;
  // Runs after every batch of this import.
  state_->engine->submit_index_job([task = state_->task](Index&) {
    std::lock_guard lock(task->mu);
    if (!task->rolled_back && task->snap.chunks_indexed == task->snap.chunks_written) {
      task->advance_locked(TaskState::kFinished);
    }
  });
}

void ImportSession::abort(const std::string& reason) {
  if (state_->done) return;
  state_->rollback(reason, std::nullopt, std::nullopt);
}

// ---------------------------------------------------------------------------
// SearchResult

std::string_view SearchResult::content_type() const noexcept {
  return geostore::content_type(format_);
}

bool SearchResult::write(const Sink& sink) const {
  if (!parents_) return sink(empty_document(format_));
  bool ok = true;
  MergeWriter writer(*parents_, [&](std::string_view s) {
    if (ok) ok = sink(s);
  });
  for (const auto& ref : refs_) {
    if (!ok) return false;
    StoredEntry e;
    try {
      e = store_->get(ref.id);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kNotFound) continue;
      throw;
    }
    writer.write(e.content);
  }
  if (!ok) return false;
  writer.finish();
  return ok;
}

std::string SearchResult::to_string() const {
  std::string out;
  write([&](std::string_view s) {
    out.append(s);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (config_.index_batch_size == 0) config_.index_batch_size = 1;
  store_ = make_store(config_.store);
  index_ = config_.index_path ? std::make_unique<Index>(*config_.index_path, config_.index_options)
                              : std::make_unique<Index>();
  worker_ = std::make_unique<IndexWorker>(*index_, config_.max_pending_index_jobs);
  if (config_.reconcile_on_start) startup_report_ = reconcile();
  for (const auto& [layer, format] : index_->layer_formats()) note_layer(layer, format);
}

Engine::~Engine() {
  worker_.reset();
}

void Engine::submit_index_job(std::function<void(Index&)> job) {
  for (;;) {
    try {
      worker_->submit(job);
      return;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kOverloaded) throw;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

void Engine::note_layer(const LayerPath& layer, std::optional<Format> format) {
  const unsigned bit = format ? 1u << static_cast<unsigned>(*format) : 0u;
  std::lock_guard lock(layers_mu_);
  std::vector<std::string> segs;
  layers_[LayerPath()] |= bit;
  for (const auto& s : layer.segments()) {
    segs.push_back(s);
    layers_[LayerPath(segs)] |= bit;
  }
}

std::optional<unsigned> Engine::layer_formats(const LayerPath& layer) const {
  std::lock_guard lock(layers_mu_);
  auto it = layers_.find(layer);
  if (it == layers_.end()) {
    if (layer.is_root()) return 0u;
    return std::nullopt;
  }
  return it->second;
}

std::shared_ptr<Engine::Task> Engine::new_task(const ImportOptions& options, std::int64_t now) {
  auto task = std::make_shared<Task>();
  task->import_id = ChunkId::generate().value;
  task->snap.id = task->import_id;
  task->snap.layer = options.layer;
  task->snap.started_at = now;
  task->snap.history.push_back(TaskState::kAccepted);
  prune_tasks(now);
  std::lock_guard lock(tasks_mu_);
  tasks_.emplace(task->snap.id, task);
  return task;
}

void Engine::prune_tasks(std::int64_t now) const {
  const auto keep = config_.task_retention.count();
  std::lock_guard lock(tasks_mu_);
  std::erase_if(tasks_, [&](const auto& kv) {
    auto snap = kv.second->snapshot();
    return snap.terminal() && snap.ended_at && now - *snap.ended_at > keep;
  });
}

std::unique_ptr<ImportSession> Engine::begin_import(ImportOptions options) {
  if (worker_->pending() >= config_.max_pending_index_jobs) {
    throw Error(ErrorCode::kOverloaded, "indexing queue is full");
  }
  const auto now = now_millis();
  auto state = std::make_unique<ImportSession::State>();
  state->engine = this;
  state->task = new_task(options, now);
  state->timestamp = now;
  state->options = std::move(options);
  note_layer(state->options.layer);
  store_->begin_import(state->task->import_id);
  auto* raw = state.get();
  state->splitter = make_splitter([raw](RawChunk&& c) { raw->store_chunk(std::move(c)); });
  return std::unique_ptr<ImportSession>(new ImportSession(std::move(state)));
}

std::string Engine::import_document(std::string_view body, ImportOptions options) {
  auto session = begin_import(std::move(options));
  constexpr std::size_t kPiece = 64 * 1024;
  for (std::size_t pos = 0; pos < body.size(); pos += kPiece) {
    session->feed(body.substr(pos, kPiece));
  }
  session->finish();
  return session->task_id();
}

SearchResult Engine::search(std::string_view query_text, const LayerPath& layer) const {
  const auto node = query::parse_query(query_text);
  SearchResult result;
  result.store_ = store_.get();
  auto refs = index_->query_refs(node, layer);
  if (refs.empty()) {
    const auto formats = layer_formats(layer);
    if (!formats) throw Error(ErrorCode::kNotFound, "no such layer: " + layer.str());
    // An empty answer takes the format of what the layer holds, if uniform.
    if (*formats == 1u << static_cast<unsigned>(Format::kGeoJson)) {
      result.format_ = Format::kGeoJson;
    }
    return result;
  }
  std::unordered_map<std::string, std::shared_ptr<const Parents>> parents;
  std::vector<std::shared_ptr<const Parents>> distinct;
  for (const auto& r : refs) {
    auto [it, fresh] = parents.try_emplace(r.import_id);
    if (!fresh) continue;
    it->second = store_->get_parents(r.import_id);
    if (it->second) distinct.push_back(it->second);
  }
  // Imports rolled back since the index was read have no parents left.
  std::erase_if(refs, [&](const DocRef& r) { return !parents[r.import_id]; });
  if (distinct.empty()) return result;
  result.parents_ = merge_parents(distinct);
  result.format_ = result.parents_->format;
  result.refs_ = std::move(refs);
  return result;
}

std::size_t Engine::remove(std::string_view query_text, const LayerPath& layer, bool all) {
  const auto node = query::parse_query(query_text);
  if (blank(query_text) && !all) {
    throw Error(ErrorCode::kInvalidArgument,
                "refusing to delete with an empty query; pass all=true");
  }
  return worker_->call<std::size_t>([&](Index& index) {
    const auto ids = index.query(node, layer);
    const auto n = index.remove(ids);
    store_->remove(ids);
    return n;
  });
}

std::size_t Engine::update_metadata(std::string_view query_text, const LayerPath& layer,
                                    const MetadataDelta& delta) {
  if (delta.empty()) throw Error(ErrorCode::kInvalidArgument, "no metadata change given");
  const auto node = query::parse_query(query_text);
  return worker_->call<std::size_t>([&](Index& index) {
    const auto ids = index.query(node, layer);
    std::vector<ChunkId> present;
    present.reserve(ids.size());
    for (const auto& id : ids) {
      try {
        store_->update_metadata(id, delta);
        present.push_back(id);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kNotFound) throw;
      }
    }
    return index.update_metadata(present, delta);
  });
}

std::optional<TaskSnapshot> Engine::task(const std::string& id) const {
  prune_tasks(now_millis());
  std::shared_ptr<Task> t;
  {
    std::lock_guard lock(tasks_mu_);
    auto it = tasks_.find(id);
    if (it == tasks_.end()) return std::nullopt;
    t = it->second;
  }
  return t->snapshot();
}

std::size_t Engine::task_count() const {
  std::lock_guard lock(tasks_mu_);
  return tasks_.size();
}

std::optional<TaskSnapshot> Engine::wait_for_task(const std::string& id,
                                                  std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto snap = task(id);
    if (!snap || snap->terminal() || std::chrono::steady_clock::now() >= deadline) return snap;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

ReconcileReport Engine::reconcile() {
  return worker_->call<ReconcileReport>([&](Index& index) {
    ReconcileReport report;
    std::vector<ChunkId> stored;
    store_->scan([&](const ChunkId& id) { stored.push_back(id); });

    const auto pending = store_->pending_imports();
    if (!pending.empty()) {
      const std::unordered_set<std::string> doomed_imports(pending.begin(), pending.end());
      std::vector<ChunkId> doomed;
      std::vector<ChunkId> kept;
      for (auto& id : stored) {
        bool drop = false;
        try {
          drop = doomed_imports.count(store_->get_metadata(id).import_id) > 0;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::kNotFound) throw;
          continue;
        }
        (drop ? doomed : kept).push_back(std::move(id));
      }
      index.remove(doomed);
      store_->remove(doomed);
      for (const auto& imp : pending) store_->end_import(imp);
      report.rolled_back_imports = pending.size();
      report.rolled_back_chunks = doomed.size();
      stored = std::move(kept);
    }

    std::unordered_set<std::string> stored_set;
    stored_set.reserve(stored.size());
    for (const auto& id : stored) stored_set.insert(id.value);
    std::vector<ChunkId> orphans;
    for (auto& id : index.ids()) {
      if (!stored_set.count(id.value)) orphans.push_back(std::move(id));
    }
    report.dropped_index_entries = index.remove(orphans);

    std::vector<ChunkId> missing;
    for (const auto& id : stored) {
      if (!index.contains(id)) missing.push_back(id);
    }
    constexpr std::size_t kBatch = 1024;
    for (std::size_t i = 0; i < missing.size(); i += kBatch) {
      std::vector<ChunkId> part(missing.begin() + i,
                                missing.begin() + std::min(missing.size(), i + kBatch));
      report.reindexed += index.add(load_documents(*store_, index, part));
    }
    return report;
  });
}

void Engine::wait_idle() { worker_->drain(); }

void Engine::set_index_throttle(std::function<void()> throttle) {
  worker_->set_throttle(std::move(throttle));
}

}  // namespace geostore
