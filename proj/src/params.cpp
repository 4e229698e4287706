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

#include "geostore/error.hpp"

namespace geostore {
namespace {

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out.push_back(s[i]);
  }
  return out;
}

std::string escape(std::string_view s, bool colon) {
  std::string out;
  for (char c : s) {
    if (c == ',' || c == '\\' || (colon && c == ':')) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Position of the first unescaped ':' or npos.
std::size_t find_separator(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
    } else if (s[i] == ':') {
      return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\' && i + 1 < text.size()) {
      cur.push_back(c);
      cur.push_back(text[++i]);
    } else if (c == ',') {
      items.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  items.push_back(std::move(cur));
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

std::map<std::string, std::string> parse_properties(std::string_view text) {
  std::map<std::string, std::string> out;
  for (const auto& item : split_list(text)) {
    const auto sep = find_separator(item);
    if (sep == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed property '" + item + "', expected key:value");
    }
    auto key = unescape(std::string_view(item).substr(0, sep));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty property key in '" + item + "'");
    }
    out[std::move(key)] = unescape(std::string_view(item).substr(sep + 1));
  }
  return out;
}

std::set<std::string> parse_tags(std::string_view text) {
  std::set<std::string> out;
  for (const auto& item : split_list(text)) out.insert(unescape(item));
  return out;
}

std::set<std::string> parse_property_keys(std::string_view text) {
  std::set<std::string> out;
  for (const auto& item : split_list(text)) {
    const auto sep = find_separator(item);
    auto key = unescape(std::string_view(item).substr(0, sep));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty property key in '" + item + "'");
    }
    out.insert(std::move(key));
  }
  return out;
}

std::string format_properties(const std::map<std::string, std::string>& props) {
  std::string out;
  for (const auto& [k, v] : props) {
    if (!out.empty()) out.push_back(',');
    out += escape(k, true);
    out.push_back(':');
    out += escape(v, false);
  }
  return out;
}

std::string format_tags(const std::set<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) {
    if (!out.empty()) out.push_back(',');
    out += escape(t, false);
  }
  return out;
}

}  // namespace geostore
