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


#include "geostore/params.hpp"

#include <gtest/gtest.h>

#include "geostore/error.hpp"

namespace geostore {
namespace {

TEST(Params, PropertiesSplitAtFirstColon) {
  const auto p = parse_properties("deleted:2018-09-13,time:2018-09-13T08:00");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.at("deleted"), "2018-09-13");
  EXPECT_EQ(p.at("time"), "2018-09-13T08:00");
}

TEST(Params, EscapesAndEmptyValues) {
  const auto p = parse_properties(R"(a\:b:c\,d,e:)");
  EXPECT_EQ(p.at("a:b"), "c,d");
  EXPECT_EQ(p.at("e"), "");
}

TEST(Params, LastDuplicateWins) {
  EXPECT_EQ(parse_properties("k:1,k:2").at("k"), "2");
}

TEST(Params, MalformedPropertiesThrow) {
  for (const char* bad : {"deleted", "a:1,b", ":x"}) {
    try {
      parse_properties(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

TEST(Params, TagsAndKeys) {
  EXPECT_EQ(parse_tags("a,,b,a"), (std::set<std::string>{"a", "b"}));
  EXPECT_TRUE(parse_tags("").empty());
  EXPECT_EQ(parse_property_keys("x,y:1"), (std::set<std::string>{"x", "y"}));
}

TEST(Params, FormatRoundTrips) {
  const std::map<std::string, std::string> props = {{"a:b", "c,d"}, {"k", "v\\w"}};
  EXPECT_EQ(parse_properties(format_properties(props)), props);
  const std::set<std::string> tags = {"x,y", "z"};
  EXPECT_EQ(parse_tags(format_tags(tags)), tags);
}

}  // namespace
}  // namespace geostore
