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

#ifndef GEOSTORE_MODEL_HPP_
#define GEOSTORE_MODEL_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geostore/error.hpp"

namespace geostore {

enum class Format { kXml, kGeoJson };

std::string_view to_string(Format format);
/// Accepts "XML" / "GEOJSON" (case-insensitive).
Format parse_format(std::string_view text);

// ---------------------------------------------------------------------------
// ChunkId

/// Opaque identifier of a stored chunk. Generated ids are time ordered so
/// lexicographic order approximates import order.
struct ChunkId {
  std::string value;

  static ChunkId generate();

  auto operator<=>(const ChunkId&) const = default;
  bool operator==(const ChunkId&) const = default;
};

// ---------------------------------------------------------------------------
// LayerPath

/// Hierarchical layer label. Canonical form is `/seg1/seg2`; the root is `/`.
/// Segment names are case-sensitive.
class LayerPath {
 public:
  LayerPath() = default;
  /// Throws kMalformedPath if a segment is empty or contains `/` or a
  /// control character.
  explicit LayerPath(std::vector<std::string> segments);

  /// Collapses duplicate and trailing slashes; "" and "/" are the root.
  static LayerPath parse(std::string_view text);

  const std::vector<std::string>& segments() const noexcept {
    return segments_;
  }
  bool is_root() const noexcept { return segments_.empty(); }
  std::string str() const;

  /// True iff this path's segments are a prefix of `other`'s.
  bool is_ancestor_or_self_of(const LayerPath& other) const noexcept;

  LayerPath child(std::string segment) const;

  auto operator<=>(const LayerPath&) const = default;
  bool operator==(const LayerPath&) const = default;

 private:
  std::vector<std::string> segments_;
};

inline bool layer_is_ancestor_or_self(const LayerPath& a, const LayerPath& b) {
  return a.is_ancestor_or_self_of(b);
}

// ---------------------------------------------------------------------------
// BoundingBox

struct BoundingBox {
  double min_x = 0;
  double min_y = 0;
  double max_x = 0;
  double max_y = 0;

  /// Throws kInvalidArgument unless all values are finite and min <= max.
  static BoundingBox make(double min_x, double min_y, double max_x,
                          double max_y);
  static BoundingBox point(double x, double y) { return {x, y, x, y}; }

  void expand(double x, double y) noexcept;
  void expand(const BoundingBox& other) noexcept;
  bool intersects(const BoundingBox& other) const noexcept {
    return min_x <= other.max_x && other.min_x <= max_x &&
           min_y <= other.max_y && other.min_y <= max_y;
  }
  bool contains(const BoundingBox& other) const noexcept {
    return min_x <= other.min_x && other.max_x <= max_x &&
           min_y <= other.min_y && other.max_y <= max_y;
  }

  bool operator==(const BoundingBox&) const = default;
};

/// Componentwise min/max over (x, y) pairs. Empty input gives nullopt.
/// Non-finite coordinates are skipped.
std::optional<BoundingBox> bounding_box_of(
    std::span<const std::pair<double, double>> points);

// ---------------------------------------------------------------------------
// DateValue

/// An ISO-8601 date or date-time kept at the granularity it was written in.
/// A value denotes the half-open interval [lower_bound, upper_bound) in
/// milliseconds since the epoch. Values without a zone are UTC.
class DateValue {
 public:
  enum class Granularity { kYear, kMonth, kDay, kMinute, kSecond, kMillisecond };

  /// Returns nullopt unless `text` is a complete, valid ISO-8601 value:
  /// YYYY, YYYY-MM, YYYY-MM-DD or YYYY-MM-DDThh:mm[:ss[.fff]][Z|+hh:mm].
  static std::optional<DateValue> parse(std::string_view text);
  static DateValue year(int y);
  /// Millisecond-granularity UTC value.
  static DateValue from_epoch_millis(std::int64_t ms);

  Granularity granularity() const noexcept { return granularity_; }
  int year() const noexcept { return year_; }
  std::optional<int> month() const;
  std::optional<int> day() const;

  std::int64_t lower_bound() const noexcept;
  /// Exclusive.
  std::int64_t upper_bound() const noexcept;

  /// ISO-8601 at the stored granularity.
  std::string str() const;

  bool operator==(const DateValue&) const = default;

 private:
  int year_ = 1970;
  int month_ = 1;
  int day_ = 1;
  int hour_ = 0;
  int minute_ = 0;
  int second_ = 0;
  int millis_ = 0;
  std::optional<int> zone_minutes_;
  Granularity granularity_ = Granularity::kYear;
};

/// ISO-8601 UTC rendering of an epoch-milliseconds instant.
std::string format_timestamp(std::int64_t epoch_ms);
std::int64_t now_millis();

// ---------------------------------------------------------------------------
// TypedValue

using TypedValue = std::variant<std::string, double, DateValue>;

inline bool is_text(const TypedValue& v) { return v.index() == 0; }
inline bool is_number(const TypedValue& v) { return v.index() == 1; }
inline bool is_date(const TypedValue& v) { return v.index() == 2; }

/// Strict numeric literal (whole string, finite).
std::optional<double> parse_number(std::string_view text);
/// Shortest text form that reads back to the same double.
std::string format_number(double value);

/// Fixed interpretation order: date, then number, then text.
TypedValue parse_typed(std::string_view text);
/// Canonical text of a value (dates at their granularity).
std::string to_text(const TypedValue& value);

// ---------------------------------------------------------------------------
// Parents, metadata, chunks

enum class CollectionKind { kFeatureCollection, kStandalone };

/// Enclosing-document context stored beside chunks so an export can be
/// re-assembled into a valid file of the original format.
struct Parents {
  Format format = Format::kXml;
  // XML: everything before the root start tag (usually the declaration).
  std::optional<std::string> declaration;
  std::string root_start;
  std::string root_end;
  // GeoJSON
  CollectionKind kind = CollectionKind::kFeatureCollection;

  bool operator==(const Parents&) const = default;
};

struct ChunkMetadata {
  LayerPath layer;
  std::set<std::string> tags;
  std::map<std::string, std::string> properties;
  std::optional<std::string> crs;
  std::int64_t import_timestamp = 0;
  Format format = Format::kXml;
  // Identifies the import the chunk came from; its Parents are stored once
  // under this id.
  std::string import_id;

  bool operator==(const ChunkMetadata&) const = default;
};

/// Change to the mutable part of a chunk's metadata. There is deliberately
/// no way to express a layer change.
struct MetadataDelta {
  std::map<std::string, std::string> set_properties;
  std::set<std::string> remove_properties;
  std::set<std::string> add_tags;
  std::set<std::string> remove_tags;

  bool empty() const noexcept {
    return set_properties.empty() && remove_properties.empty() &&
           add_tags.empty() && remove_tags.empty();
  }
  /// Returns true if `meta` changed.
  bool apply(ChunkMetadata& meta) const;
};

struct Chunk {
  ChunkId id;
  std::string content;
  std::shared_ptr<const Parents> parents;
  std::uint64_t sequence = 0;
  Format format = Format::kXml;
};

}  // namespace geostore

template <>
struct std::hash<geostore::ChunkId> {
  std::size_t operator()(const geostore::ChunkId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};

#endif  // GEOSTORE_MODEL_HPP_
