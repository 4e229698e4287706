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

#ifndef GEOSTORE_TESTS_FIXTURES_HPP_
#define GEOSTORE_TESTS_FIXTURES_HPP_

// Synthetic CityGML and GeoJSON inputs.

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace geostore::testing {

struct CityGmlOptions {
  int buildings = 10;
  // Number of 3D polygons per building; each adds roughly 300 bytes.
  int polygons = 2;
  std::string city = "Köln";
  std::vector<std::string> streets = {"Schildergasse", "Hohe Straße",
                                      "Breite Straße", "Neumarkt"};
  bool envelope = true;
  std::string srs = "EPSG:25832";
  std::uint64_t seed = 1;
  std::string id_prefix = "B";
};

inline void append_building(std::string& out, std::mt19937_64& rng,
                            const CityGmlOptions& o, int i,
                            const std::string& street) {
  std::uniform_real_distribution<double> ux(356000, 358000), uy(5644000, 5646000);
  char buf[256];
  out += "  <core:cityObjectMember>\n    <bldg:Building gml:id=\"";
  out += o.id_prefix + std::to_string(i);
  out += "\">\n";
  std::snprintf(buf, sizeof buf,
                "      <gen:stringAttribute name=\"owner\"><gen:value>%s</gen:value></gen:stringAttribute>\n"
                "      <gen:doubleAttribute name=\"height\"><gen:value>%.1f</gen:value></gen:doubleAttribute>\n",
                i % 3 == 0 ? "city" : "private", 5.0 + (i % 40));
  out += buf;
  out +=
      "      <bldg:address><core:Address><core:xalAddress><xAL:AddressDetails>"
      "<xAL:Country><xAL:CountryName>Deutschland</xAL:CountryName>"
      "<xAL:Locality Type=\"Town\"><xAL:LocalityName>";
  out += o.city;
  out += "</xAL:LocalityName><xAL:Thoroughfare Type=\"Street\"><xAL:ThoroughfareNumber>";
  out += std::to_string(1 + i % 99);
  out += "</xAL:ThoroughfareNumber><xAL:ThoroughfareName>";
  out += street;
  out +=
      "</xAL:ThoroughfareName></xAL:Thoroughfare></xAL:Locality></xAL:Country>"
      "</xAL:AddressDetails></core:xalAddress></core:Address></bldg:address>\n"
      "      <bldg:lod2Solid><gml:Solid><gml:exterior><gml:CompositeSurface>\n";
  const double x0 = ux(rng), y0 = uy(rng);
  for (int p = 0; p < o.polygons; ++p) {
    out += "        <gml:surfaceMember><gml:Polygon><gml:exterior><gml:LinearRing>"
           "<gml:posList srsDimension=\"3\">";
    for (int k = 0; k < 5; ++k) {
      const double dx = (k == 1 || k == 2) ? 10.0 : 0.0;
      const double dy = (k == 2 || k == 3) ? 8.0 : 0.0;
      std::snprintf(buf, sizeof buf, "%s%.3f %.3f %.3f", k ? " " : "",
                    x0 + dx + p * 0.001, y0 + dy, 50.0 + p);
      out += buf;
    }
    out += "</gml:posList></gml:LinearRing></gml:exterior></gml:Polygon></gml:surfaceMember>\n";
  }
  out +=
      "      </gml:CompositeSurface></gml:exterior></gml:Solid></bldg:lod2Solid>\n"
      "    </bldg:Building>\n  </core:cityObjectMember>\n";
}

inline const char* kCityGmlRoot =
    "<core:CityModel xmlns:core=\"http://www.opengis.net/citygml/2.0\" "
    "xmlns:bldg=\"http://www.opengis.net/citygml/building/2.0\" "
    "xmlns:gen=\"http://www.opengis.net/citygml/generics/2.0\" "
    "xmlns:gml=\"http://www.opengis.net/gml\" "
    "xmlns:xAL=\"urn:oasis:names:tc:ciq:xsdschema:xAL:2.0\">\n";

inline std::string make_citygml(const CityGmlOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += kCityGmlRoot;
  if (o.envelope) {
    out += "  <gml:boundedBy>\n    <gml:Envelope srsName=\"" + o.srs +
           "\" srsDimension=\"3\">\n"
           "      <gml:lowerCorner>356000 5644000 0</gml:lowerCorner>\n"
           "      <gml:upperCorner>358010 5646008 120</gml:upperCorner>\n"
           "    </gml:Envelope>\n  </gml:boundedBy>\n";
  }
  for (int i = 0; i < o.buildings; ++i) {
    append_building(out, rng, o, i, o.streets[i % o.streets.size()]);
  }
  out += "</core:CityModel>\n";
  return out;
}

inline void append_feature(std::string& out, std::mt19937_64& rng, long i,
                           int ring_points = 5) {
  std::uniform_real_distribution<double> ux(6.9, 7.1), uy(50.9, 51.0);
  const double x = ux(rng), y = uy(rng);
  char buf[160];
  out += "{\"type\":\"Feature\",\"properties\":{\"name\":\"Feature ";
  out += std::to_string(i);
  std::snprintf(buf, sizeof buf,
                "\",\"height\":%.1f,\"city\":\"%s\",\"built\":\"%d-0%d-1%d\","
                "\"meta\":{\"source\":\"survey\",\"valid\":%s}},",
                3.0 + i % 50, i % 2 ? "Köln" : "Berlin", 1950 + int(i % 70),
                1 + int(i % 9), int(i % 10), i % 4 ? "true" : "false");
  out += buf;
  out += "\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[";
  for (int k = 0; k < ring_points; ++k) {
    std::snprintf(buf, sizeof buf, "%s[%.6f,%.6f]", k ? "," : "",
                  x + 0.0001 * (k % 3), y + 0.0001 * (k / 2));
    out += buf;
  }
  out += "]]}}";
}

inline std::string make_geojson(long features, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[\n";
  for (long i = 0; i < features; ++i) {
    if (i) out += ",\n";
    append_feature(out, rng, i);
  }
  out += "\n]}\n";
  return out;
}

/// Produces a FeatureCollection piece by piece without materializing it.
class GeoJsonStream {
 public:
  GeoJsonStream(long features, int ring_points, std::uint64_t seed = 1)
      : features_(features), ring_points_(ring_points), rng_(seed) {}

  /// Next piece of roughly `size` bytes; empty when done.
  std::string next(std::size_t size) {
    std::string out;
    if (!started_) {
      out = "{\"type\":\"FeatureCollection\",\"features\":[";
      started_ = true;
    }
    while (out.size() < size && emitted_ < features_) {
      if (emitted_) out += ',';
      append_feature(out, rng_, emitted_, ring_points_);
      ++emitted_;
    }
    if (emitted_ == features_ && !closed_ && out.size() < size) {
      out += "]}";
      closed_ = true;
    }
    return out;
  }


 private:
  long features_;
  int ring_points_;
  std::mt19937_64 rng_;
  long emitted_ = 0;
  bool started_ = false;
  bool closed_ = false;
};

}  // namespace geostore::testing

#endif  // GEOSTORE_TESTS_FIXTURES_HPP_
