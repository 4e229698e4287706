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

#include "geostore/xml_scan.hpp"

#include <algorithm>
#include <charconv>

#include "geostore/error.hpp"
#include "geostore/text.hpp"

namespace geostore::xml {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_space);
}

std::string_view local_name(std::string_view qname) {
  const auto colon = qname.rfind(':');
  return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

std::string_view prefix_of(std::string_view qname) {
  const auto colon = qname.find(':');
  return colon == std::string_view::npos ? std::string_view{}
                                         : qname.substr(0, colon);
}

namespace {

[[noreturn]] void malformed(const std::string& message, std::uint64_t offset) {
  throw Error(ErrorCode::kXmlMalformed, message, offset);
}

bool is_name_char(char c) {
  return !(is_space(c) || c == '/' || c == '>' || c == '=' || c == '<' ||
           c == '"' || c == '\'' || c == '?' || c == '!');
}

bool is_name_start(char c) {
  return is_name_char(c) && !(c >= '0' && c <= '9') && c != '-' && c != '.';
}

// Finds `terminator` at or after `from`; npos if absent.
std::size_t find_from(std::string_view buf, std::string_view terminator,
                      std::size_t from) {
  return buf.find(terminator, from);
}

// Result of a tag scan: npos end means "incomplete".
ScanStatus scan_tag(std::string_view buf, std::size_t pos, bool at_eof,
                    Item& out, std::uint64_t base) {
  const bool end_tag = pos + 1 < buf.size() && buf[pos + 1] == '/';
  std::size_t i = pos + (end_tag ? 2 : 1);
  auto need_more = [&]() -> ScanStatus {
    if (!at_eof) return ScanStatus::kNeedMore;
    malformed("unexpected end of input inside tag", base + pos);
  };
  if (i >= buf.size()) return need_more();
  if (!is_name_start(buf[i])) malformed("invalid tag name", base + i);
  const std::size_t name_begin = i;
  while (i < buf.size() && is_name_char(buf[i])) ++i;
  if (i >= buf.size()) return need_more();
  out.name = buf.substr(name_begin, i - name_begin);
  out.attributes.clear();

  if (end_tag) {
    while (i < buf.size() && is_space(buf[i])) ++i;
    if (i >= buf.size()) return need_more();
    if (buf[i] != '>') malformed("expected '>' in end tag", base + i);
    out.kind = ItemKind::kEndTag;
    out.begin = pos;
    out.end = i + 1;
    return ScanStatus::kItem;
  }

  for (;;) {
    const std::size_t before_space = i;
    while (i < buf.size() && is_space(buf[i])) ++i;
    if (i >= buf.size()) return need_more();
    const char c = buf[i];
    if (c == '>') {
      out.kind = ItemKind::kStartTag;
      out.begin = pos;
      out.end = i + 1;
      return ScanStatus::kItem;
    }
    if (c == '/') {
      if (i + 1 >= buf.size()) return need_more();
      if (buf[i + 1] != '>') malformed("expected '/>'", base + i);
      out.kind = ItemKind::kEmptyTag;
      out.begin = pos;
      out.end = i + 2;
      return ScanStatus::kItem;
    }
    if (i == before_space) {
      malformed("expected whitespace before attribute", base + i);
    }
    if (!is_name_start(c)) malformed("invalid attribute name", base + i);
    const std::size_t attr_begin = i;
    while (i < buf.size() && is_name_char(buf[i])) ++i;
    const std::size_t attr_end = i;
    while (i < buf.size() && is_space(buf[i])) ++i;
    if (i >= buf.size()) return need_more();
    if (buf[i] != '=') malformed("expected '=' after attribute name", base + i);
    ++i;
    while (i < buf.size() && is_space(buf[i])) ++i;
    if (i >= buf.size()) return need_more();
    const char quote = buf[i];
    if (quote != '"' && quote != '\'') {
      malformed("attribute value must be quoted", base + i);
    }
    const std::size_t value_begin = ++i;
    while (i < buf.size() && buf[i] != quote) {
      if (buf[i] == '<') malformed("'<' in attribute value", base + i);
      ++i;
    }
    if (i >= buf.size()) return need_more();
    out.attributes.push_back(
        {buf.substr(attr_begin, attr_end - attr_begin),
         buf.substr(value_begin, i - value_begin)});
    ++i;
  }
}

}  // namespace

ScanStatus scan_item(std::string_view buf, std::size_t pos, bool at_eof,
                     Item& out, std::uint64_t base, std::size_t search_from) {
  if (pos >= buf.size()) return ScanStatus::kEnd;
  out.name = {};
  out.attributes.clear();
  if (buf[pos] != '<') {
    auto lt = buf.find('<', pos);
    if (lt == std::string_view::npos) lt = buf.size();
    out.kind = ItemKind::kText;
    out.begin = pos;
    out.end = lt;
    return ScanStatus::kItem;
  }

  const std::size_t from = std::max(search_from, pos);
  auto delimited = [&](ItemKind kind, std::size_t body, std::string_view term,
                       const char* what) -> ScanStatus {
    const std::size_t start = std::max(from, body);
    const std::size_t back = start >= term.size() - 1 ? term.size() - 1 : start;
    auto hit = find_from(buf, term, std::max(body, start - back));
    if (hit == std::string_view::npos) {
      if (!at_eof) return ScanStatus::kNeedMore;
      malformed(std::string("unterminated ") + what, base + pos);
    }
    out.kind = kind;
    out.begin = pos;
    out.end = hit + term.size();
    return ScanStatus::kItem;
  };

  auto starts = [&](std::string_view s) {
    return buf.substr(pos, s.size()) == s;
  };
  // Prefix of `s` present but buffer too short to decide.
  auto partial = [&](std::string_view s) {
    const auto avail = buf.size() - pos;
    return avail < s.size() && s.substr(0, avail) == buf.substr(pos);
  };

  if (pos + 1 >= buf.size()) {
    if (!at_eof) return ScanStatus::kNeedMore;
    malformed("unexpected end of input after '<'", base + pos);
  }
  const char c1 = buf[pos + 1];
  if (c1 == '?') {
    auto st = delimited(ItemKind::kProcessingInstruction, pos + 2, "?>",
                        "processing instruction");
    if (st == ScanStatus::kItem) {
      std::size_t i = pos + 2;
      while (i < out.end - 2 && !is_space(buf[i])) ++i;
      out.name = buf.substr(pos + 2, i - pos - 2);
      if (out.name.empty()) malformed("missing PI target", base + pos);
    }
    return st;
  }
  if (c1 == '!') {
    if (starts("<!--")) {
      return delimited(ItemKind::kComment, pos + 4, "-->", "comment");
    }
    if (starts("<![CDATA[")) {
      return delimited(ItemKind::kCData, pos + 9, "]]>", "CDATA section");
    }
    if (starts("<!DOCTYPE")) {
      std::size_t i = pos + 9;
      int brackets = 0;
      char quote = 0;
      for (; i < buf.size(); ++i) {
        const char c = buf[i];
        if (quote) {
          if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
          quote = c;
        } else if (c == '[') {
          ++brackets;
        } else if (c == ']') {
          --brackets;
        } else if (c == '>' && brackets <= 0) {
          out.kind = ItemKind::kDoctype;
          out.begin = pos;
          out.end = i + 1;
          return ScanStatus::kItem;
        }
      }
      if (!at_eof) return ScanStatus::kNeedMore;
      malformed("unterminated DOCTYPE", base + pos);
    }
    if (!at_eof && (partial("<!--") || partial("<![CDATA[") ||
                    partial("<!DOCTYPE"))) {
      return ScanStatus::kNeedMore;
    }
    malformed("unrecognised markup declaration", base + pos);
  }
  return scan_tag(buf, pos, at_eof, out, base);
}

std::string decode_entities(std::string_view raw) {
  if (raw.find('&') == std::string_view::npos) return std::string(raw);
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] != '&') {
      out += raw[i++];
      continue;
    }
    const auto semi = raw.find(';', i);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += raw[i++];
      continue;
    }
    const auto ref = raw.substr(i + 1, semi - i - 1);
    bool ok = true;
    if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "amp") {
      out += '&';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (ref.size() > 1 && ref[0] == '#') {
      const bool hex = ref[1] == 'x' || ref[1] == 'X';
      const auto digits = ref.substr(hex ? 2 : 1);
      unsigned long cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                     cp, hex ? 16 : 10);
      ok = ec == std::errc{} && p == digits.data() + digits.size() &&
           !digits.empty() && cp > 0 && cp <= 0x10FFFF;
      if (ok) text::append_utf8(out, static_cast<char32_t>(cp));
    } else {
      ok = false;
    }
    if (ok) {
      i = semi + 1;
    } else {
      out += raw[i++];
    }
  }
  return out;
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace geostore::xml
