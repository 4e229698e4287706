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

#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <sstream>

#include "geostore/splitter.hpp"
#include "support/fixtures.hpp"

namespace geostore {
namespace {

bool has(const std::vector<std::string>& tokens, const std::string& t) {
  return std::binary_search(tokens.begin(), tokens.end(), t);
}

TEST(ExtractBbox, GeoJsonPoint) {
  auto box = extract_bbox(Format::kGeoJson,
                          R"({"type":"Feature","geometry":{"type":"Point","coordinates":[13.4,52.5]}})");
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, BoundingBox::make(13.4, 52.5, 13.4, 52.5));
}

TEST(ExtractBbox, GeoJsonNestedRings) {
  auto box = extract_bbox(Format::kGeoJson, R"({"geometry":{"type":"MultiPolygon",
      "coordinates":[[[[0,0],[4,1],[2,5],[0,0]]],[[[-3,2,9],[-1,-2,9]]]]}})");
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, BoundingBox::make(-3, -2, 4, 5));
}

TEST(ExtractBbox, PosListThreeDimensions) {
  auto box = extract_bbox(Format::kXml,
                          R"(<gml:posList srsDimension="3">0 0 5 2 3 7</gml:posList>)");
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, BoundingBox::make(0, 0, 2, 3));
}

TEST(ExtractBbox, DimensionInheritedFromAncestor) {
  auto box = extract_bbox(
      Format::kXml,
      R"(<a srsDimension="3"><b><pos>1 2 100</pos><pos>4 -1 200</pos></b></a>)");
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, BoundingBox::make(1, -1, 4, 2));
}

TEST(ExtractBbox, CornersAndGml2Coordinates) {
  auto box = extract_bbox(Format::kXml,
                          "<Envelope><lowerCorner>1 2</lowerCorner>"
                          "<upperCorner>3 4</upperCorner></Envelope>"
                          "<coordinates>5,6 7,8</coordinates>");
  ASSERT_TRUE(box);
  EXPECT_EQ(*box, BoundingBox::make(1, 2, 7, 8));
}

TEST(ExtractBbox, NoGeometry) {
  EXPECT_FALSE(extract_bbox(Format::kXml, "<a><name>x</name></a>"));
  EXPECT_FALSE(extract_bbox(Format::kGeoJson, R"({"type":"Feature","geometry":null})"));
  EXPECT_FALSE(extract_bbox(Format::kXml, "<pos>not numbers</pos>"));
}

// Independent grouper: regex over the element text, then fixed-size groups.
TEST(ExtractBbox, MatchesBruteForceGrouper) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    const int dim = 2 + int(rng() % 3);
    const int points = 1 + int(rng() % 8);
    std::ostringstream xml;
    xml << "<f><g srsDimension=\"" << dim << "\"><gml:posList>";
    std::vector<double> values;
    for (int i = 0; i < points * dim; ++i) {
      const double v = double(int(rng() % 2001) - 1000) / 8.0;
      values.push_back(v);
      xml << (i ? " " : "") << v;
    }
    xml << "</gml:posList></g></f>";

    static const std::regex body("<gml:posList>([^<]*)</gml:posList>");
    std::smatch m;
    const std::string doc = xml.str();
    ASSERT_TRUE(std::regex_search(doc, m, body));
    std::istringstream nums(m[1].str());
    std::vector<double> parsed;
    for (double v; nums >> v;) parsed.push_back(v);
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (std::size_t k = 0; k + dim <= parsed.size(); k += dim) {
      x0 = std::min(x0, parsed[k]);
      x1 = std::max(x1, parsed[k]);
      y0 = std::min(y0, parsed[k + 1]);
      y1 = std::max(y1, parsed[k + 1]);
    }
    auto box = extract_bbox(Format::kXml, doc);
    ASSERT_TRUE(box);
    EXPECT_EQ(*box, BoundingBox::make(x0, y0, x1, y1)) << doc;
  }
}

TEST(ExtractAttributes, GeoJsonProperties) {
  auto attrs = extract_attributes(
      Format::kGeoJson, R"({"properties":{"name":"Berlin","height":12.5}})");
  ASSERT_EQ(attrs.size(), 2u);
  EXPECT_EQ(attrs[0], (IndexedAttribute{"name", std::string("Berlin")}));
  EXPECT_EQ(attrs[1], (IndexedAttribute{"height", 12.5}));
  EXPECT_TRUE(extract_attributes(Format::kGeoJson, R"({"properties":{}})").empty());
}

TEST(ExtractAttributes, GeoJsonTyping) {
  auto attrs = extract_attributes(Format::kGeoJson, R"({"properties":{
      "zip":"50667","built":"2018-09-13","ok":true,"gone":null,
      "addr":{"street":"Schildergasse","no":{"value":12}},"floors":[1,2]}})");
  std::map<std::string, std::vector<TypedValue>> by_key;
  for (const auto& a : attrs) by_key[a.key].push_back(a.value);
  EXPECT_EQ(by_key["zip"], std::vector<TypedValue>{std::string("50667")});
  EXPECT_EQ(by_key["built"], std::vector<TypedValue>{*DateValue::parse("2018-09-13")});
  EXPECT_EQ(by_key["ok"], std::vector<TypedValue>{std::string("true")});
  EXPECT_EQ(by_key.count("gone"), 0u);
  EXPECT_EQ(by_key["addr.street"], std::vector<TypedValue>{std::string("Schildergasse")});
  EXPECT_EQ(by_key["addr.no.value"], std::vector<TypedValue>{12.0});
  EXPECT_EQ(by_key["floors"], (std::vector<TypedValue>{1.0, 2.0}));
}

TEST(ExtractAttributes, CityGmlGenericAttributes) {
  auto attrs = extract_attributes(
      Format::kXml,
      R"(<gen:stringAttribute name="owner"><gen:value>city</gen:value></gen:stringAttribute>)");
  ASSERT_EQ(attrs.size(), 1u);
  EXPECT_EQ(attrs[0], (IndexedAttribute{"owner", std::string("city")}));

  attrs = extract_attributes(Format::kXml, R"(<b>
      <gen:doubleAttribute name="height"><gen:value> 12.5 </gen:value></gen:doubleAttribute>
      <gen:dateAttribute name="built"><gen:value>1998-05-01</gen:value></gen:dateAttribute>
      <gen:stringAttribute name="note"><gen:value>a &amp; b</gen:value></gen:stringAttribute>
      <gen:stringAttribute><gen:value>nameless</gen:value></gen:stringAttribute>
      <name>x</name><value>not paired</value></b>)");
  ASSERT_EQ(attrs.size(), 3u);
  EXPECT_EQ(attrs[0], (IndexedAttribute{"height", 12.5}));
  EXPECT_EQ(attrs[1], (IndexedAttribute{"built", *DateValue::parse("1998-05-01")}));
  EXPECT_EQ(attrs[2], (IndexedAttribute{"note", std::string("a & b")}));
}

TEST(ExtractAttributes, ValueMustBeDirectChild) {
  auto attrs = extract_attributes(
      Format::kXml,
      R"(<x:fooAttribute name="k"><wrap><x:value>deep</x:value></wrap></x:fooAttribute>)");
  EXPECT_TRUE(attrs.empty());
}

TEST(ExtractTokens, XmlAddressText) {
  testing::CityGmlOptions o;
  o.buildings = 1;
  auto chunks = split(testing::make_citygml(o));
  const auto& building = chunks.back();
  auto tokens = extract_tokens(Format::kXml, building.content);
  EXPECT_TRUE(has(tokens, "schildergasse"));
  EXPECT_TRUE(has(tokens, "köln"));
  EXPECT_TRUE(has(tokens, "deutschland"));
  EXPECT_TRUE(has(tokens, "b0"));  // gml:id attribute value
  EXPECT_TRUE(has(tokens, "town"));
  EXPECT_FALSE(has(tokens, "cityobjectmember"));  // element names are not text
  EXPECT_TRUE(std::is_sorted(tokens.begin(), tokens.end()));
}

TEST(ExtractTokens, GeoJsonValues) {
  auto tokens = extract_tokens(
      Format::kGeoJson,
      R"({"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[13.4,-52.5]}})");
  EXPECT_TRUE(has(tokens, "13.4"));
  EXPECT_TRUE(has(tokens, "-52.5"));
  EXPECT_TRUE(has(tokens, "point"));
  EXPECT_FALSE(has(tokens, "coordinates"));  // keys are not values
}

TEST(ExtractTokens, EntityDecodingAndCData) {
  auto tokens = extract_tokens(Format::kXml,
                               "<a t=\"K&#246;ln\">Stra&#223;e<![CDATA[<Ring>]]></a>");
  EXPECT_TRUE(has(tokens, "köln"));
  EXPECT_TRUE(has(tokens, "straße"));
  EXPECT_TRUE(has(tokens, "ring"));
}

class CountingExtractor : public Extractor {
 public:
  void extract(std::string_view, Extraction& out) const override {
    out.attributes.push_back({"seen", 1.0});
  }
};

TEST(ExtractorRegistry, RunsRegisteredExtractorsPerFormat) {
  ExtractorRegistry r;
  r.add(Format::kXml, make_xml_token_extractor());
  r.add(Format::kXml, std::make_shared<CountingExtractor>());
  auto x = r.run(Format::kXml, "<a>Hello</a>");
  EXPECT_EQ(x.tokens, std::vector<std::string>{"hello"});
  ASSERT_EQ(x.attributes.size(), 1u);
  auto j = r.run(Format::kGeoJson, R"({"a":"b"})");
  EXPECT_TRUE(j.tokens.empty());
  EXPECT_TRUE(j.attributes.empty());
}

TEST(MakeDocument, CombinesExtractionAndMetadata) {
  ChunkMetadata m;
  m.format = Format::kGeoJson;
  m.layer = LayerPath::parse("/a");
  auto doc = make_document(ChunkId{"x"}, 4,
                           R"({"properties":{"name":"Berlin"},"geometry":{"coordinates":[1,2]}})",
                           m);
  EXPECT_EQ(doc.chunk_id.value, "x");
  EXPECT_EQ(doc.sequence, 4u);
  EXPECT_EQ(doc.bbox, BoundingBox::make(1, 2, 1, 2));
  EXPECT_TRUE(doc.has_token("berlin"));
  EXPECT_EQ(doc.metadata, m);
}

TEST(Extract, FuzzedChunksNeverThrow) {
  std::mt19937_64 rng(5);
  const std::string xml = testing::make_citygml({.buildings = 1});
  const std::string json = testing::make_geojson(1);
  const std::string alphabet = "<>/\"{}[],:= 0123456789.-eE";
  for (int i = 0; i < 3000; ++i) {
    std::string doc = i % 2 ? xml : json;
    for (int e = 0; e < 3; ++e) {
      doc[rng() % doc.size()] = alphabet[rng() % alphabet.size()];
    }
    const Format f = i % 2 ? Format::kXml : Format::kGeoJson;
    EXPECT_NO_THROW(ExtractorRegistry::standard().run(f, doc));
  }
}

}  // namespace
}  // namespace geostore
