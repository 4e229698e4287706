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

#ifndef GEOSTORE_TEXT_HPP_
#define GEOSTORE_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace geostore::text {

/// Lowercases UTF-8 text. ASCII, Latin-1, Latin Extended-A/Additional, Greek
/// and Cyrillic capitals are folded; everything else passes through.
std::string to_lower(std::string_view utf8);

/// Splits UTF-8 text into lowercased full-text tokens: maximal runs of
/// letters and digits, where `.` and `-` are kept when they sit between two
/// digits (so "13.378" and "2018-09-13" stay whole) and a leading `-` is
/// kept in front of a digit. Tokens are appended in order of appearance.
void tokenize(std::string_view utf8, std::vector<std::string>& out);
std::vector<std::string> tokenize(std::string_view utf8);

/// Appends the UTF-8 encoding of `code_point`.
void append_utf8(std::string& out, char32_t code_point);

}  // namespace geostore::text

#endif  // GEOSTORE_TEXT_HPP_
