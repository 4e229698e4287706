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


#ifndef GEOSTORE_PARAMS_HPP_
#define GEOSTORE_PARAMS_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace geostore {

/// Splits on commas not escaped with a backslash. Escapes are kept so a
/// later split on ':' can still tell them apart.
std::vector<std::string> split_list(std::string_view text);

/// `k1:v1,k2:v2`. The key ends at the first unescaped ':'; `\,`, `\:` and
/// `\\` are unescaped afterwards. Throws Error(kInvalidArgument) when a pair
/// has no ':' or an empty key.
std::map<std::string, std::string> parse_properties(std::string_view text);

/// `a,b,c`; empty items are dropped.
std::set<std::string> parse_tags(std::string_view text);

/// Keys for property removal. A `key:value` item contributes its key.
std::set<std::string> parse_property_keys(std::string_view text);

std::string format_properties(const std::map<std::string, std::string>& props);
std::string format_tags(const std::set<std::string>& tags);

}  // namespace geostore

#endif  // GEOSTORE_PARAMS_HPP_
