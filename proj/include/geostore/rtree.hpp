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

#ifndef GEOSTORE_RTREE_HPP_
#define GEOSTORE_RTREE_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "geostore/model.hpp"

namespace geostore {

/// Immutable R-tree bulk-loaded with sort-tile-recursive packing.
class PackedRTree {
 public:
  struct Entry {
    BoundingBox box;
    std::uint32_t slot = 0;
  };

  explicit PackedRTree(std::vector<Entry> entries, std::size_t fanout = 16);

  /// Calls `f(entry)` for every entry whose box intersects `query`.
  template <typename F>
  void search(const BoundingBox& query, F&& f) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t height() const noexcept { return levels_.size(); }

 private:
  struct Node {
    BoundingBox box;
    std::uint32_t first = 0;  // into the level below (or entries_)
    std::uint32_t count = 0;
  };

  std::vector<Entry> entries_;
  // levels_[0] is the leaf level; levels_.back() holds the root(s).
  std::vector<std::vector<Node>> levels_;
};

template <typename F>
void PackedRTree::search(const BoundingBox& query, F&& f) const {
  if (levels_.empty()) return;
  struct Frame {
    std::size_t level;
    std::uint32_t index;
  };
  std::vector<Frame> stack;
  const auto& top = levels_.back();
  for (std::uint32_t i = 0; i < top.size(); ++i) {
    stack.push_back({levels_.size() - 1, i});
  }
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const Node& node = levels_[fr.level][fr.index];
    if (!node.box.intersects(query)) continue;
    if (fr.level == 0) {
      for (std::uint32_t e = node.first; e < node.first + node.count; ++e) {
        if (entries_[e].box.intersects(query)) f(entries_[e]);
      }
    } else {
      for (std::uint32_t c = node.first; c < node.first + node.count; ++c) {
        stack.push_back({fr.level - 1, c});
      }
    }
  }
}

/// Log-structured collection of packed trees. Inserts land in a small buffer
/// that is packed into a tree when full; trees of similar size are merged,
/// dropping entries the `keep` predicate rejects.
class SpatialIndex {
 public:
  using Keep = std::function<bool(const PackedRTree::Entry&)>;

  explicit SpatialIndex(Keep keep, std::size_t buffer_limit = 512);

  void insert(const BoundingBox& box, std::uint32_t slot);
  /// Candidates may include stale entries; callers re-check.
  template <typename F>
  void search(const BoundingBox& query, F&& f) const;

  void clear();
  std::size_t tree_count() const noexcept { return trees_.size(); }
  std::size_t entry_count() const noexcept;

 private:
  void flush();

  Keep keep_;
  std::size_t buffer_limit_;
  std::vector<PackedRTree::Entry> buffer_;
  std::vector<PackedRTree> trees_;  // sizes decrease towards the back
};

template <typename F>
void SpatialIndex::search(const BoundingBox& query, F&& f) const {
  for (const auto& e : buffer_) {
    if (e.box.intersects(query)) f(e);
  }
  for (const auto& t : trees_) t.search(query, f);
}

}  // namespace geostore

#endif  // GEOSTORE_RTREE_HPP_
