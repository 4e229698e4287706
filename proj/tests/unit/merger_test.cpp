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

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "geostore/error.hpp"
#include "geostore/splitter.hpp"
#include "support/fixtures.hpp"

namespace geostore {
namespace {

namespace pt = boost::property_tree;

std::shared_ptr<const Parents> xml_root(const std::string& start, const std::string& end) {
  auto p = std::make_shared<Parents>();
  p->declaration = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";
  p->root_start = start;
  p->root_end = end;
  return p;
}

std::vector<StoredEntry> entries_of(const std::string& doc, const std::string& prefix) {
  std::vector<StoredEntry> out;
  for (auto& c : split(doc)) {
    StoredEntry e;
    e.id = ChunkId{prefix + std::to_string(c.sequence)};
    e.content = std::move(c.content);
    e.parents = c.parents;
    e.sequence = c.sequence;
    out.push_back(std::move(e));
  }
  return out;
}

std::string squeeze(const std::string& xml) {
  static const std::regex between_tags(">\\s+<");
  return std::regex_replace(xml, between_tags, "><");
}

std::set<std::string> prefixes(const std::string& tag) {
  static const std::regex ns("xmlns:([A-Za-z0-9_]+)=");
  std::set<std::string> out;
  for (std::sregex_iterator it(tag.begin(), tag.end(), ns), end; it != end; ++it) {
    out.insert((*it)[1]);
  }
  return out;
}

std::size_t xml_children(const std::string& xml) {
  pt::ptree tree;
  std::istringstream in(xml);
  pt::read_xml(in, tree);
  std::size_t n = 0;
  for (const auto& child : tree.begin()->second) {
    if (child.first != "<xmlattr>" && child.first != "<xmlcomment>") ++n;
  }
  return n;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

TEST(MergeParents, IdenticalIsIdempotent) {
  auto p = xml_root("<core:CityModel  xmlns:core=\"urn:c\"\n xmlns:gml='urn:g'>",
                    "</core:CityModel>");
  EXPECT_EQ(merge_parents({p, p}), *p);
  auto copy = std::make_shared<Parents>(*p);
  EXPECT_EQ(merge_parents({p, copy}), *p);
}

TEST(MergeParents, NamespaceUnion) {
  auto a = xml_root(R"(<CityModel xmlns:gml="urn:gml">)", "</CityModel>");
  auto b = xml_root(R"(<CityModel xmlns:gml="urn:gml" xmlns:gen="urn:gen">)", "</CityModel>");
  auto merged = merge_parents({a, b});
  auto expected = prefixes(a->root_start);
  for (const auto& x : prefixes(b->root_start)) expected.insert(x);
  EXPECT_EQ(prefixes(merged.root_start), expected);
  EXPECT_EQ(merged.root_end, "</CityModel>");
  EXPECT_EQ(merged.declaration, a->declaration);
  // The merged tag is itself well-formed.
  EXPECT_NO_THROW(split(merged.root_start + merged.root_end));
}

TEST(MergeParents, SuperSetFirstStaysVerbatim) {
  auto a = xml_root("<r  xmlns:a=\"1\" xmlns:b=\"2\" >", "</r>");
  auto b = xml_root("<r xmlns:b='2'>", "</r>");
  EXPECT_EQ(merge_parents({a, b}).root_start, a->root_start);
}

TEST(MergeParents, PrefixedRootsWithSameLocalName) {
  auto a = xml_root(R"(<core:CityModel xmlns:core="urn:c">)", "</core:CityModel>");
  auto b = xml_root(R"(<CityModel xmlns="urn:c">)", "</CityModel>");
  auto merged = merge_parents({a, b});
  EXPECT_EQ(merged.root_start, R"(<core:CityModel xmlns:core="urn:c" xmlns="urn:c">)");
}

TEST(MergeParents, Conflicts) {
  auto city = xml_root("<CityModel>", "</CityModel>");
  auto fc = xml_root("<FeatureCollection>", "</FeatureCollection>");
  EXPECT_EQ(code_of([&] { merge_parents({city, fc}); }), ErrorCode::kIncompatibleParents);
  auto g1 = xml_root(R"(<r xmlns:gml="urn:a">)", "</r>");
  auto g2 = xml_root(R"(<r xmlns:gml="urn:b">)", "</r>");
  EXPECT_EQ(code_of([&] { merge_parents({g1, g2}); }), ErrorCode::kIncompatibleParents);
  auto v1 = xml_root(R"(<r version="1">)", "</r>");
  auto v2 = xml_root(R"(<r version="2">)", "</r>");
  EXPECT_EQ(code_of([&] { merge_parents({v1, v2}); }), ErrorCode::kIncompatibleParents);
  auto same = xml_root(R"(<r version='1'>)", "</r>");
  EXPECT_NO_THROW(merge_parents({v1, same}));
  auto json = std::make_shared<Parents>();
  json->format = Format::kGeoJson;
  EXPECT_EQ(code_of([&] { merge_parents({city, json}); }), ErrorCode::kIncompatibleParents);
  EXPECT_EQ(code_of([&] { merge_parents({}); }), ErrorCode::kIncompatibleParents);
}

TEST(MergeParents, GeoJsonKind) {
  auto fc = std::make_shared<Parents>();
  fc->format = Format::kGeoJson;
  auto single = std::make_shared<Parents>(*fc);
  single->kind = CollectionKind::kStandalone;
  EXPECT_EQ(merge_parents({single, fc}).kind, CollectionKind::kFeatureCollection);
  EXPECT_EQ(merge_parents({single}).kind, CollectionKind::kStandalone);
}

TEST(Merge, CityGmlRoundTrip) {
  testing::CityGmlOptions o;
  o.buildings = 30;
  const auto doc = testing::make_citygml(o);
  const auto out = merge_to_string(entries_of(doc, "c"));
  EXPECT_EQ(squeeze(out), squeeze(doc));
  // Splitting the export yields byte-identical chunks.
  auto again = split(out);
  auto orig = split(doc);
  ASSERT_EQ(again.size(), orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i) EXPECT_EQ(again[i].content, orig[i].content);
}

TEST(Merge, GeoJsonRoundTrip) {
  const auto doc = testing::make_geojson(200);
  const auto out = merge_to_string(entries_of(doc, "g"));
  EXPECT_EQ(nlohmann::json::parse(out), nlohmann::json::parse(doc));
  auto again = split(out);
  auto orig = split(doc);
  ASSERT_EQ(again.size(), orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i) EXPECT_EQ(again[i].content, orig[i].content);
}

TEST(Merge, StandaloneIsWrapped) {
  const std::string feature = R"({"type":"Feature","properties":{"a":1},"geometry":null})";
  const auto out = merge_to_string(entries_of(feature, "s"));
  auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j["type"], "FeatureCollection");
  ASSERT_EQ(j["features"].size(), 1u);
  EXPECT_EQ(j["features"][0], nlohmann::json::parse(feature));
}

TEST(Merge, EmptyDocuments) {
  const auto xml = merge_to_string({});
  EXPECT_EQ(xml_children(xml), 0u);
  auto j = nlohmann::json::parse(merge_to_string({}, Format::kGeoJson));
  EXPECT_EQ(j["features"].size(), 0u);
  EXPECT_EQ(content_type(Format::kXml), "application/xml");
  EXPECT_EQ(content_type(Format::kGeoJson), "application/geo+json");
}

TEST(Merge, RandomSubsetsOfCompatibleImportsStayValid) {
  testing::CityGmlOptions a;
  a.buildings = 12;
  testing::CityGmlOptions b = a;
  b.seed = 9;
  b.id_prefix = "X";
  auto docb = testing::make_citygml(b);
  // Second import declares one extra namespace.
  docb.replace(docb.find("<core:CityModel ") + 16, 0, "xmlns:app=\"urn:app\" ");
  auto ea = entries_of(testing::make_citygml(a), "a");
  auto eb = entries_of(docb, "b");
  auto ja = entries_of(testing::make_geojson(15, 1), "ja");
  auto jb = entries_of(R"({"type":"Feature","properties":{},"geometry":null})", "jb");
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    const bool xml = round % 2 == 0;
    std::vector<StoredEntry> pick;
    for (const auto* src : xml ? std::vector{&ea, &eb} : std::vector{&ja, &jb}) {
      for (const auto& e : *src) {
        if (rng() % 3 == 0) pick.push_back(e);
      }
    }
    std::shuffle(pick.begin(), pick.end(), rng);
    const auto out = merge_to_string(pick);
    if (pick.empty()) continue;
    if (xml) {
      ASSERT_EQ(xml_children(out), pick.size()) << out.substr(0, 400);
    } else {
      ASSERT_EQ(nlohmann::json::parse(out)["features"].size(), pick.size());
    }
  }
}

TEST(Merge, StreamsWithoutBuffering) {
  auto parents = std::make_shared<Parents>();
  parents->format = Format::kGeoJson;
  const std::string chunk = R"({"type":"Feature","properties":{"n":1},"geometry":null})";
  std::size_t calls = 0, largest = 0, bytes = 0;
  bool header_seen_early = false;
  MergeWriter w(*parents, [&](std::string_view s) {
    ++calls;
    bytes += s.size();
    largest = std::max(largest, s.size());
  });
  header_seen_early = calls > 0;
  for (int i = 0; i < 100000; ++i) w.write(chunk);
  w.finish();
  EXPECT_TRUE(header_seen_early);
  EXPECT_EQ(w.chunks(), 100000u);
  EXPECT_LE(largest, chunk.size());
  EXPECT_EQ(bytes, 100000 * (chunk.size() + 1) - 1 + std::string_view(
                       R"({"type":"FeatureCollection","features":[]})").size());
}

}  // namespace
}  // namespace geostore
