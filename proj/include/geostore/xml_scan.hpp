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

#ifndef GEOSTORE_XML_SCAN_HPP_
#define GEOSTORE_XML_SCAN_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace geostore::xml {

// Lightweight, non-validating XML item scanner shared by the splitter and the
// XML extractors. It recognises markup boundaries and tag structure only;
// views returned in an Item point into the scanned buffer.

enum class ItemKind {
  kText,
  kStartTag,
  kEmptyTag,
  kEndTag,
  kComment,
  kCData,
  kProcessingInstruction,
  kDoctype,
};

struct Attribute {
  std::string_view name;
  std::string_view raw_value;  // without quotes, entities not decoded
};

struct Item {
  ItemKind kind = ItemKind::kText;
  std::size_t begin = 0;  // offsets into the scanned buffer
  std::size_t end = 0;
  std::string_view name;  // tag name or PI target
  std::vector<Attribute> attributes;
};

enum class ScanStatus { kItem, kNeedMore, kEnd };

/// Scans the item starting at `pos`. Text items end at the next `<` or the end
/// of `buf`, so a long text run may come back as several items. Markup items
/// are only returned complete: if `buf` ends inside one and `at_eof` is false
/// the result is kNeedMore. `search_from` lets a caller that already knows a
/// terminator is not before some offset skip rescanning that prefix.
///
/// Throws Error(kXmlMalformed) with offset `base_offset + <index>`.
ScanStatus scan_item(std::string_view buf, std::size_t pos, bool at_eof,
                     Item& out, std::uint64_t base_offset = 0,
                     std::size_t search_from = 0);

std::string_view local_name(std::string_view qname);
/// "gml" for "gml:pos", "" for "pos".
std::string_view prefix_of(std::string_view qname);

/// Replaces the five predefined entities and numeric character references.
/// Unknown references are copied through unchanged.
std::string decode_entities(std::string_view raw);

/// Escapes `&`, `<` and `"` for use inside a double-quoted attribute value.
std::string escape_attribute(std::string_view value);

bool is_space(char c);
bool is_blank(std::string_view s);

}  // namespace geostore::xml

#endif  // GEOSTORE_XML_SCAN_HPP_
