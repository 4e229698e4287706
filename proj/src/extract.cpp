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

#include "geostore/extract.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "geostore/error.hpp"
#include "geostore/text.hpp"
#include "geostore/xml_scan.hpp"

namespace geostore {
namespace {

void expand(std::optional<BoundingBox>& box, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return;
  if (box) {
    box->expand(x, y);
  } else {
    box = BoundingBox::point(x, y);
  }
}

void finish_tokens(std::vector<std::string>& tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
}

// Walks every item of a complete XML fragment.
template <typename F>
void for_each_item(std::string_view content, F&& f) {
  xml::Item item;
  std::size_t pos = 0;
  try {
    while (xml::scan_item(content, pos, true, item) == xml::ScanStatus::kItem) {
      f(item);
      pos = item.end;
    }
  } catch (const Error&) {
    // Chunks come from the splitter and are well-formed; anything else is
    // indexed as far as it could be read.
  }
}

std::string_view attribute(const xml::Item& item, std::string_view local) {
  for (const auto& a : item.attributes) {
    if (xml::local_name(a.name) == local) return a.raw_value;
  }
  return {};
}

bool is_coordinate_element(std::string_view local) {
  return local == "posList" || local == "pos" || local == "coordinates" ||
         local == "lowerCorner" || local == "upperCorner";
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void add_positions(std::string_view text, int dim,
                   std::optional<BoundingBox>& box) {
  std::vector<double> numbers;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (xml::is_space(text[i]) || text[i] == ',')) ++i;
    std::size_t j = i;
    while (j < text.size() && !xml::is_space(text[j]) && text[j] != ',') ++j;
    if (j > i) {
      double v = 0;
      if (!parse_double(text.substr(i, j - i), v)) return;
      numbers.push_back(v);
    }
    i = j;
  }
  for (std::size_t k = 0; k + dim <= numbers.size(); k += dim) {
    expand(box, numbers[k], numbers[k + 1]);
  }
}

class XmlBboxExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    std::vector<int> dims;
    std::string text;
    std::size_t collecting = 0;  // stack depth of the coordinate element
    for_each_item(content, [&](const xml::Item& item) {
      switch (item.kind) {
        case xml::ItemKind::kStartTag:
        case xml::ItemKind::kEmptyTag: {
          int dim = dims.empty() ? 2 : dims.back();
          if (auto raw = attribute(item, "srsDimension"); !raw.empty()) {
            int v = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec == std::errc() && p == raw.data() + raw.size() && v >= 2) dim = v;
          }
          if (item.kind == xml::ItemKind::kEmptyTag) break;
          dims.push_back(dim);
          if (!collecting && is_coordinate_element(xml::local_name(item.name))) {
            collecting = dims.size();
            text.clear();
          }
          break;
        }
        case xml::ItemKind::kEndTag:
          if (collecting && collecting == dims.size()) {
            add_positions(text, dims.back(), out.bbox);
            collecting = 0;
          }
          if (!dims.empty()) dims.pop_back();
          break;
        case xml::ItemKind::kText:
          if (collecting) {
            text += xml::decode_entities(content.substr(item.begin, item.end - item.begin));
          }
          break;
        case xml::ItemKind::kCData:
          if (collecting) {
            text += content.substr(item.begin + 9, item.end - item.begin - 12);
          }
          break;
        default:
          break;
      }
    });
  }
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

class XmlAttributeExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    struct Open {
      std::string key;
      std::size_t depth;
      bool in_value = false;
      std::string value;
      bool has_value = false;
    };
    std::vector<Open> open;
    std::size_t depth = 0;
    for_each_item(content, [&](const xml::Item& item) {
      switch (item.kind) {
        case xml::ItemKind::kStartTag:
        case xml::ItemKind::kEmptyTag: {
          const auto local = xml::local_name(item.name);
          const bool empty = item.kind == xml::ItemKind::kEmptyTag;
          if (!open.empty() && depth == open.back().depth &&
              local == "value" && !open.back().has_value) {
            open.back().has_value = true;
            open.back().in_value = !empty;
          }
          if (empty) break;
          ++depth;
          if (ends_with(local, "Attribute") && local.size() > 9) {
            for (const auto& a : item.attributes) {
              if (a.name == "name") {
                open.push_back({xml::decode_entities(a.raw_value), depth, false, {}, false});
                break;
              }
            }
          }
          break;
        }
        case xml::ItemKind::kEndTag:
          if (!open.empty()) {
            auto& top = open.back();
            if (top.in_value && depth == top.depth + 1) top.in_value = false;
            if (depth == top.depth) {
              if (top.has_value) {
                auto trimmed = top.value;
                auto b = trimmed.find_first_not_of(" \t\r\n");
                auto e = trimmed.find_last_not_of(" \t\r\n");
                trimmed = b == std::string::npos ? "" : trimmed.substr(b, e - b + 1);
                out.attributes.push_back({top.key, parse_typed(trimmed)});
              }
              open.pop_back();
            }
          }
          if (depth) --depth;
          break;
        case xml::ItemKind::kText:
          if (!open.empty() && open.back().in_value && depth == open.back().depth + 1) {
            open.back().value +=
                xml::decode_entities(content.substr(item.begin, item.end - item.begin));
          }
          break;
        case xml::ItemKind::kCData:
          if (!open.empty() && open.back().in_value && depth == open.back().depth + 1) {
            open.back().value += content.substr(item.begin + 9, item.end - item.begin - 12);
          }
          break;
        default:
          break;
      }
    });
  }
};

class XmlTokenExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    for_each_item(content, [&](const xml::Item& item) {
      switch (item.kind) {
        case xml::ItemKind::kStartTag:
        case xml::ItemKind::kEmptyTag:
          for (const auto& a : item.attributes) {
            text::tokenize(xml::decode_entities(a.raw_value), out.tokens);
          }
          break;
        case xml::ItemKind::kText:
          text::tokenize(
              xml::decode_entities(content.substr(item.begin, item.end - item.begin)),
              out.tokens);
          break;
        case xml::ItemKind::kCData:
          text::tokenize(content.substr(item.begin + 9, item.end - item.begin - 12),
                         out.tokens);
          break;
        default:
          break;
      }
    });
    finish_tokens(out.tokens);
  }
};

using Json = nlohmann::ordered_json;

std::optional<Json> parse_json(std::string_view content) {
  auto j = Json::parse(content, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

void collect_positions(const Json& j, std::optional<BoundingBox>& box) {
  if (!j.is_array()) return;
  if (j.size() >= 2 && j[0].is_number() && j[1].is_number()) {
    expand(box, j[0].get<double>(), j[1].get<double>());
    return;
  }
  for (const auto& e : j) collect_positions(e, box);
}

void find_coordinates(const Json& j, std::optional<BoundingBox>& box) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "coordinates") {
        collect_positions(it.value(), box);
      } else {
        find_coordinates(it.value(), box);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) find_coordinates(e, box);
  }
}

class GeoJsonBboxExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    if (auto j = parse_json(content)) find_coordinates(*j, out.bbox);
  }
};

void flatten(const std::string& key, const Json& v,
             std::vector<IndexedAttribute>& out) {
  switch (v.type()) {
    case Json::value_t::object:
      for (auto it = v.begin(); it != v.end(); ++it) {
        flatten(key.empty() ? it.key() : key + "." + it.key(), it.value(), out);
      }
      break;
    case Json::value_t::array:
      for (const auto& e : v) flatten(key, e, out);
      break;
    case Json::value_t::string: {
      const auto& s = v.get_ref<const std::string&>();
      if (auto d = DateValue::parse(s)) {
        out.push_back({key, *d});
      } else {
        out.push_back({key, s});
      }
      break;
    }
    case Json::value_t::boolean:
      out.push_back({key, std::string(v.get<bool>() ? "true" : "false")});
      break;
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float:
      out.push_back({key, v.get<double>()});
      break;
    default:
      break;
  }
}

class GeoJsonAttributeExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    auto j = parse_json(content);
    if (!j || !j->is_object()) return;
    auto props = j->find("properties");
    if (props == j->end() || !props->is_object()) return;
    for (auto it = props->begin(); it != props->end(); ++it) {
      flatten(it.key(), it.value(), out.attributes);
    }
  }
};

void json_tokens(const Json& j, std::vector<std::string>& out) {
  switch (j.type()) {
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& e : j) json_tokens(e, out);
      break;
    case Json::value_t::string:
      text::tokenize(j.get_ref<const std::string&>(), out);
      break;
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float:
      text::tokenize(j.dump(), out);
      break;
    default:
      break;
  }
}

class GeoJsonTokenExtractor final : public Extractor {
 public:
  void extract(std::string_view content, Extraction& out) const override {
    if (auto j = parse_json(content)) json_tokens(*j, out.tokens);
    finish_tokens(out.tokens);
  }
};

}  // namespace

void ExtractorRegistry::add(Format format,
                            std::shared_ptr<const Extractor> extractor) {
  by_format_[format].push_back(std::move(extractor));
}

Extraction ExtractorRegistry::run(Format format, std::string_view content) const {
  Extraction out;
  if (auto it = by_format_.find(format); it != by_format_.end()) {
    for (const auto& e : it->second) e->extract(content, out);
  }
  finish_tokens(out.tokens);
  return out;
}

const ExtractorRegistry& ExtractorRegistry::standard() {
  static const ExtractorRegistry registry = [] {
    ExtractorRegistry r;
    r.add(Format::kXml, make_xml_bbox_extractor());
    r.add(Format::kXml, make_xml_attribute_extractor());
    r.add(Format::kXml, make_xml_token_extractor());
    r.add(Format::kGeoJson, make_geojson_bbox_extractor());
    r.add(Format::kGeoJson, make_geojson_attribute_extractor());
    r.add(Format::kGeoJson, make_geojson_token_extractor());
    return r;
  }();
  return registry;
}

std::shared_ptr<const Extractor> make_xml_bbox_extractor() {
  return std::make_shared<XmlBboxExtractor>();
}
std::shared_ptr<const Extractor> make_xml_attribute_extractor() {
  return std::make_shared<XmlAttributeExtractor>();
}
std::shared_ptr<const Extractor> make_xml_token_extractor() {
  return std::make_shared<XmlTokenExtractor>();
}
std::shared_ptr<const Extractor> make_geojson_bbox_extractor() {
  return std::make_shared<GeoJsonBboxExtractor>();
}
std::shared_ptr<const Extractor> make_geojson_attribute_extractor() {
  return std::make_shared<GeoJsonAttributeExtractor>();
}
std::shared_ptr<const Extractor> make_geojson_token_extractor() {
  return std::make_shared<GeoJsonTokenExtractor>();
}

std::optional<BoundingBox> extract_bbox(Format format, std::string_view content) {
  Extraction out;
  if (format == Format::kXml) {
    XmlBboxExtractor().extract(content, out);
  } else {
    GeoJsonBboxExtractor().extract(content, out);
  }
  return out.bbox;
}

std::vector<IndexedAttribute> extract_attributes(Format format,
                                                 std::string_view content) {
  Extraction out;
  if (format == Format::kXml) {
    XmlAttributeExtractor().extract(content, out);
  } else {
    GeoJsonAttributeExtractor().extract(content, out);
  }
  return out.attributes;
}

std::vector<std::string> extract_tokens(Format format, std::string_view content) {
  Extraction out;
  if (format == Format::kXml) {
    XmlTokenExtractor().extract(content, out);
  } else {
    GeoJsonTokenExtractor().extract(content, out);
  }
  return out.tokens;
}

IndexDocument make_document(const ChunkId& id, std::uint64_t sequence,
                            std::string_view content,
                            const ChunkMetadata& metadata,
                            const ExtractorRegistry& registry) {
  auto found = registry.run(metadata.format, content);
  IndexDocument doc;
  doc.chunk_id = id;
  doc.sequence = sequence;
  doc.bbox = found.bbox;
  doc.attributes = std::move(found.attributes);
  doc.tokens = std::move(found.tokens);
  doc.metadata = metadata;
  return doc;
}

}  // namespace geostore
