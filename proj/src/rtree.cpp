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

#include "geostore/rtree.hpp"

#include <algorithm>
#include <cmath>

namespace geostore {
namespace {

double center_x(const BoundingBox& b) { return (b.min_x + b.max_x) / 2; }
double center_y(const BoundingBox& b) { return (b.min_y + b.max_y) / 2; }

// Orders items into STR tiles: vertical slices by x center, each slice by y.
template <typename T, typename Box>
void str_order(std::vector<T>& items, std::size_t fanout, Box box_of) {
  const std::size_t n = items.size();
  if (n <= fanout) return;
  const std::size_t pages = (n + fanout - 1) / fanout;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(double(pages))));
  const std::size_t per_slice = slices * fanout;
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    return center_x(box_of(a)) < center_x(box_of(b));
  });
  for (std::size_t s = 0; s < n; s += per_slice) {
    auto last = items.begin() + std::min(n, s + per_slice);
    std::sort(items.begin() + s, last, [&](const T& a, const T& b) {
      return center_y(box_of(a)) < center_y(box_of(b));
    });
  }
}

}  // namespace

PackedRTree::PackedRTree(std::vector<Entry> entries, std::size_t fanout)
    : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  fanout = std::max<std::size_t>(fanout, 2);
  str_order(entries_, fanout, [](const Entry& e) -> const BoundingBox& { return e.box; });

  std::vector<Node> level;
  for (std::size_t i = 0; i < entries_.size(); i += fanout) {
    Node node;
    node.first = static_cast<std::uint32_t>(i);
    node.count = static_cast<std::uint32_t>(std::min(fanout, entries_.size() - i));
    node.box = entries_[i].box;
    for (std::size_t k = i + 1; k < i + node.count; ++k) {
      node.box.expand(entries_[k].box);
    }
    level.push_back(node);
  }
  while (true) {
    str_order(level, fanout, [](const Node& n) -> const BoundingBox& { return n.box; });
    levels_.push_back(std::move(level));
    const auto& below = levels_.back();
    if (below.size() <= fanout) break;
    level.clear();
    for (std::size_t i = 0; i < below.size(); i += fanout) {
      Node node;
      node.first = static_cast<std::uint32_t>(i);
      node.count = static_cast<std::uint32_t>(std::min(fanout, below.size() - i));
      node.box = below[i].box;
      for (std::size_t k = i + 1; k < i + node.count; ++k) {
        node.box.expand(below[k].box);
      }
      level.push_back(node);
    }
  }
}

SpatialIndex::SpatialIndex(Keep keep, std::size_t buffer_limit)
    : keep_(std::move(keep)), buffer_limit_(std::max<std::size_t>(buffer_limit, 1)) {}

void SpatialIndex::insert(const BoundingBox& box, std::uint32_t slot) {
  buffer_.push_back({box, slot});
  if (buffer_.size() >= buffer_limit_) flush();
}

void SpatialIndex::flush() {
  std::vector<PackedRTree::Entry> merged;
  for (const auto& e : buffer_) {
    if (keep_(e)) merged.push_back(e);
  }
  buffer_.clear();
  // Merge with trailing trees while they are not much larger.
  while (!trees_.empty() && trees_.back().size() <= 2 * merged.size()) {
    for (const auto& e : trees_.back().entries()) {
      if (keep_(e)) merged.push_back(e);
    }
    trees_.pop_back();
  }
  if (!merged.empty()) trees_.emplace_back(std::move(merged));
}

void SpatialIndex::clear() {
  buffer_.clear();
  trees_.clear();
}

std::size_t SpatialIndex::entry_count() const noexcept {
  std::size_t n = buffer_.size();
  for (const auto& t : trees_) n += t.size();
  return n;
}

}  // namespace geostore
