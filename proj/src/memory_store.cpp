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

#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <unordered_map>

#include "geostore/error.hpp"
#include "geostore/store.hpp"

namespace geostore {
namespace {

class MemoryStore final : public ChunkStore {
 public:
  void put(const StoredEntry& entry) override {
    std::unique_lock lock(mu_);
    if (entries_.count(entry.id.value)) {
      throw Error(ErrorCode::kDuplicateId, "chunk exists: " + entry.id.value);
    }
    auto& parents = parents_[entry.metadata.import_id];
    if (!parents) parents = entry.parents;
    Stored s{entry.content, entry.metadata, entry.sequence};
    entries_.emplace(entry.id.value, std::move(s));
  }

  StoredEntry get(const ChunkId& id) const override {
    std::shared_lock lock(mu_);
    const auto& s = find(id);
    StoredEntry e;
    e.id = id;
    e.content = s.content;
    e.metadata = s.metadata;
    e.sequence = s.sequence;
    if (auto it = parents_.find(s.metadata.import_id); it != parents_.end()) {
      e.parents = it->second;
    }
    return e;
  }

  ChunkMetadata get_metadata(const ChunkId& id) const override {
    std::shared_lock lock(mu_);
    return find(id).metadata;
  }

  std::size_t remove(const std::vector<ChunkId>& ids) override {
    std::unique_lock lock(mu_);
    std::size_t n = 0;
    for (const auto& id : ids) n += entries_.erase(id.value);
    return n;
  }

  bool update_metadata(const ChunkId& id, const MetadataDelta& delta) override {
    std::unique_lock lock(mu_);
    auto it = entries_.find(id.value);
    if (it == entries_.end()) throw Error(ErrorCode::kNotFound, "no chunk " + id.value);
    return delta.apply(it->second.metadata);
  }

  void scan(const std::function<void(const ChunkId&)>& visit) const override {
    std::vector<ChunkId> ids;
    {
      std::shared_lock lock(mu_);
      ids.reserve(entries_.size());
      for (const auto& [id, s] : entries_) ids.push_back(ChunkId{id});
    }
    for (const auto& id : ids) visit(id);
  }

  std::size_t size() const override {
    std::shared_lock lock(mu_);
    return entries_.size();
  }

  std::shared_ptr<const Parents> get_parents(const std::string& import_id) const override {
    std::shared_lock lock(mu_);
    auto it = parents_.find(import_id);
    return it == parents_.end() ? nullptr : it->second;
  }

  void begin_import(const std::string& import_id) override {
    std::unique_lock lock(mu_);
    pending_.insert(import_id);
  }
  void end_import(const std::string& import_id) override {
    std::unique_lock lock(mu_);
    pending_.erase(import_id);
  }
  std::vector<std::string> pending_imports() const override {
    std::shared_lock lock(mu_);
    return {pending_.begin(), pending_.end()};
  }

  void sync() override {}

 private:
  struct Stored {
    std::string content;
    ChunkMetadata metadata;
    std::uint64_t sequence;
  };

  const Stored& find(const ChunkId& id) const {
    auto it = entries_.find(id.value);
    if (it == entries_.end()) throw Error(ErrorCode::kNotFound, "no chunk " + id.value);
    return it->second;
  }

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Stored> entries_;
  std::unordered_map<std::string, std::shared_ptr<const Parents>> parents_;
  std::set<std::string> pending_;
};

}  // namespace

std::unique_ptr<ChunkStore> make_memory_store() {
  return std::make_unique<MemoryStore>();
}

}  // namespace geostore
