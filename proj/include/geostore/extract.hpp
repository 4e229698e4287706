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

#ifndef GEOSTORE_EXTRACT_HPP_
#define GEOSTORE_EXTRACT_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geostore/document.hpp"
#include "geostore/model.hpp"

namespace geostore {

/// What the extractors found in one chunk.
struct Extraction {
  std::optional<BoundingBox> bbox;
  std::vector<IndexedAttribute> attributes;
  std::vector<std::string> tokens;  // sorted, unique
};

/// Looks for one kind of pattern in chunk content. Extractors must tolerate
/// content they do not understand and never throw on well-formed chunks.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual void extract(std::string_view content, Extraction& out) const = 0;
};

/// Extractors grouped by format; each registered extractor runs in
/// registration order.
class ExtractorRegistry {
 public:
  void add(Format format, std::shared_ptr<const Extractor> extractor);
  Extraction run(Format format, std::string_view content) const;

  /// Bbox, attribute and token extractors for XML and GeoJSON.
  static const ExtractorRegistry& standard();

 private:
  std::map<Format, std::vector<std::shared_ptr<const Extractor>>> by_format_;
};

std::shared_ptr<const Extractor> make_xml_bbox_extractor();
std::shared_ptr<const Extractor> make_xml_attribute_extractor();
std::shared_ptr<const Extractor> make_xml_token_extractor();
std::shared_ptr<const Extractor> make_geojson_bbox_extractor();
std::shared_ptr<const Extractor> make_geojson_attribute_extractor();
std::shared_ptr<const Extractor> make_geojson_token_extractor();

std::optional<BoundingBox> extract_bbox(Format format, std::string_view content);
std::vector<IndexedAttribute> extract_attributes(Format format,
                                                 std::string_view content);
std::vector<std::string> extract_tokens(Format format, std::string_view content);

/// Builds the searchable projection of a stored chunk.
IndexDocument make_document(
    const ChunkId& id, std::uint64_t sequence, std::string_view content,
    const ChunkMetadata& metadata,
    const ExtractorRegistry& registry = ExtractorRegistry::standard());

}  // namespace geostore

#endif  // GEOSTORE_EXTRACT_HPP_
