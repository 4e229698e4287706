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

#include "geostore/merger.hpp"

#include <map>

#include "geostore/error.hpp"
#include "geostore/xml_scan.hpp"

namespace geostore {
namespace {

[[noreturn]] void incompatible(const std::string& why) {
  throw Error(ErrorCode::kIncompatibleParents, why);
}

struct RootTag {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // raw values
};

RootTag parse_root(const std::string& start_tag) {
  xml::Item item;
  try {
    if (xml::scan_item(start_tag, 0, true, item) != xml::ScanStatus::kItem ||
        item.kind != xml::ItemKind::kStartTag) {
      incompatible("root start tag is not a start tag: " + start_tag);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIncompatibleParents) throw;
    incompatible("unreadable root start tag: " + start_tag);
  }
  RootTag root{std::string(item.name), {}};
  for (const auto& a : item.attributes) {
    root.attributes.emplace_back(std::string(a.name), std::string(a.raw_value));
  }
  return root;
}

bool is_namespace(const std::string& name) {
  return name == "xmlns" || name.rfind("xmlns:", 0) == 0;
}

Parents merge_xml(const std::vector<std::shared_ptr<const Parents>>& all) {
  const Parents& first = *all.front();
  RootTag merged = parse_root(first.root_start);
  std::map<std::string, std::string> values;  // decoded
  for (const auto& [n, v] : merged.attributes) values[n] = xml::decode_entities(v);
  bool grown = false;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (*all[i] == first) continue;
    const RootTag other = parse_root(all[i]->root_start);
    if (xml::local_name(other.name) != xml::local_name(merged.name)) {
      incompatible("root elements differ: " + merged.name + " vs " + other.name);
    }
    for (const auto& [n, v] : other.attributes) {
      const auto decoded = xml::decode_entities(v);
      auto it = values.find(n);
      if (it == values.end()) {
        values.emplace(n, decoded);
        merged.attributes.emplace_back(n, v);
        grown = true;
      } else if (it->second != decoded) {
        incompatible((is_namespace(n) ? "namespace " : "attribute ") + n +
                     " has conflicting values");
      }
    }
  }
  Parents out = first;
  if (grown) {
    std::string tag = "<" + merged.name;
    for (const auto& [n, v] : merged.attributes) {
      const char q = v.find('"') == std::string::npos ? '"' : '\'';
      tag += ' ' + n + '=' + q + v + q;
    }
    out.root_start = tag + ">";
  }
  return out;
}

}  // namespace

Parents merge_parents(const std::vector<std::shared_ptr<const Parents>>& parents) {
  if (parents.empty()) incompatible("nothing to merge");
  for (const auto& p : parents) {
    if (!p) incompatible("chunk without parents");
    if (p->format != parents.front()->format) incompatible("chunks have different formats");
  }
  if (parents.front()->format == Format::kXml) return merge_xml(parents);
  Parents out;
  out.format = Format::kGeoJson;
  out.kind = CollectionKind::kStandalone;
  for (const auto& p : parents) {
    if (p->kind == CollectionKind::kFeatureCollection) {
      out.kind = CollectionKind::kFeatureCollection;
    }
  }
  return out;
}

MergeWriter::MergeWriter(const Parents& parents, Sink sink)
    : parents_(parents), sink_(std::move(sink)) {
  if (parents_.format == Format::kXml) {
    if (parents_.declaration) {
      sink_(*parents_.declaration);
      sink_("\n");
    }
    sink_(parents_.root_start);
  } else {
    sink_(R"({"type":"FeatureCollection","features":[)");
  }
}

void MergeWriter::write(std::string_view chunk_content) {
  if (parents_.format == Format::kXml) {
    sink_("\n");
  } else if (chunks_ > 0) {
    sink_(",");
  }
  sink_(chunk_content);
  ++chunks_;
}

void MergeWriter::finish() {
  if (finished_) return;
  finished_ = true;
  if (parents_.format == Format::kXml) {
    sink_("\n");
    sink_(parents_.root_end);
    sink_("\n");
  } else {
    sink_("]}");
  }
}

std::string empty_document(Format format) {
  if (format == Format::kGeoJson) return R"({"type":"FeatureCollection","features":[]})";
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<FeatureCollection></FeatureCollection>\n";
}

void merge(const std::vector<StoredEntry>& entries, const MergeWriter::Sink& sink,
           Format empty_format) {
  if (entries.empty()) {
    sink(empty_document(empty_format));
    return;
  }
  std::vector<std::shared_ptr<const Parents>> parents;
  for (const auto& e : entries) parents.push_back(e.parents);
  MergeWriter w(merge_parents(parents), sink);
  for (const auto& e : entries) w.write(e.content);
  w.finish();
}

std::string merge_to_string(const std::vector<StoredEntry>& entries, Format empty_format) {
  std::string out;
  merge(entries, [&](std::string_view s) { out.append(s); }, empty_format);
  return out;
}

std::string_view content_type(Format format) {
  return format == Format::kXml ? "application/xml" : "application/geo+json";
}

}  // namespace geostore
