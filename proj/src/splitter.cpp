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

#include "geostore/splitter.hpp"

#include <algorithm>
#include <istream>

#include <nlohmann/json.hpp>

#include "geostore/xml_scan.hpp"

namespace geostore {

Format detect_format(std::string_view prefix) {
  std::size_t i = 0;
  if (prefix.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < prefix.size() && xml::is_space(prefix[i])) ++i;
  if (i == prefix.size()) {
    throw Error(ErrorCode::kUnsupportedFormat, "input is empty", 0);
  }
  switch (prefix[i]) {
    case '<': return Format::kXml;
    case '{':
    case '[': return Format::kGeoJson;
    default:
      throw Error(ErrorCode::kUnsupportedFormat,
                  "input is neither XML nor GeoJSON", i);
  }
}

namespace {

// Owns the byte buffer. Subclasses scan `buf_` and report which prefix can be
// dropped after each feed.
class BufferedSplitter : public Splitter {
 public:
  explicit BufferedSplitter(Sink sink) : sink_(std::move(sink)) {}

  void feed(std::string_view data) final {
    if (finished_) {
      throw Error(ErrorCode::kInvalidArgument, "feed() after finish()");
    }
    stats_.bytes_consumed += data.size();
    if (!bom_checked_) {
      // Hold back up to three bytes until we know whether a BOM is present.
      pending_bom_.append(data);
      if (pending_bom_.size() < 3 &&
          std::string_view("\xEF\xBB\xBF").substr(0, pending_bom_.size()) ==
              pending_bom_) {
        return;
      }
      bom_checked_ = true;
      std::string_view rest = pending_bom_;
      if (rest.substr(0, 3) == "\xEF\xBB\xBF") {
        rest.remove_prefix(3);
        base_ = 3;
      }
      buf_.append(rest);
      pending_bom_.clear();
    } else {
      buf_.append(data);
    }
    stats_.peak_buffered_bytes =
        std::max(stats_.peak_buffered_bytes, buf_.size());
    process(false);
    compact(keep_from());
  }

  void finish() final {
    if (finished_) return;
    finished_ = true;
    if (!bom_checked_) {
      bom_checked_ = true;
      buf_.append(pending_bom_);
      pending_bom_.clear();
    }
    process(true);
    complete();
  }

  const SplitStats& stats() const final { return stats_; }

 protected:
  virtual void process(bool at_eof) = 0;
  virtual std::size_t keep_from() const = 0;
  virtual void on_compact(std::size_t dropped) = 0;
  virtual void complete() = 0;

  void emit(std::size_t begin, std::size_t end,
            std::shared_ptr<const Parents> parents,
            std::optional<std::string> crs, Format format) {
    RawChunk chunk;
    chunk.content.assign(buf_, begin, end - begin);
    chunk.parents = std::move(parents);
    chunk.sequence = stats_.chunks++;
    chunk.crs_hint = std::move(crs);
    chunk.format = format;
    stats_.max_chunk_bytes = std::max(stats_.max_chunk_bytes, end - begin);
    sink_(std::move(chunk));
  }

  std::string buf_;
  std::uint64_t base_ = 0;  // absolute input offset of buf_[0]

 private:
  void compact(std::size_t keep) {
    if (keep == 0) return;
    buf_.erase(0, keep);
    base_ += keep;
    on_compact(keep);
  }

  Sink sink_;
  SplitStats stats_;
  std::string pending_bom_;
  bool bom_checked_ = false;
  bool finished_ = false;
};

// ---------------------------------------------------------------------------
// XML

std::optional<std::string> srs_name(const xml::Item& item) {
  for (const auto& a : item.attributes) {
    if (xml::local_name(a.name) == "srsName") {
      return xml::decode_entities(a.raw_value);
    }
  }
  return std::nullopt;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && xml::is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Reads the encoding pseudo-attribute of an XML declaration.
std::optional<std::string> declared_encoding(std::string_view decl) {
  const auto at = decl.find("encoding");
  if (at == std::string_view::npos) return std::nullopt;
  std::size_t i = at + 8;
  while (i < decl.size() && xml::is_space(decl[i])) ++i;
  if (i >= decl.size() || decl[i] != '=') return std::nullopt;
  ++i;
  while (i < decl.size() && xml::is_space(decl[i])) ++i;
  if (i >= decl.size() || (decl[i] != '"' && decl[i] != '\'')) {
    return std::nullopt;
  }
  const char quote = decl[i++];
  const auto end = decl.find(quote, i);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(decl.substr(i, end - i));
}

class XmlSplitter final : public BufferedSplitter {
 public:
  using BufferedSplitter::BufferedSplitter;

  std::optional<Format> format() const override { return Format::kXml; }

 protected:
  void process(bool at_eof) override {
    xml::Item item;
    for (;;) {
      const auto status =
          xml::scan_item(buf_, pos_, at_eof, item, base_, search_hint_);
      if (status == xml::ScanStatus::kEnd) break;
      if (status == xml::ScanStatus::kNeedMore) {
        search_hint_ = buf_.size();
        break;
      }
      search_hint_ = 0;
      handle(item);
      pos_ = item.end;
    }
  }

  std::size_t keep_from() const override {
    if (state_ == State::kProlog) return 0;
    return chunk_open_ ? chunk_start_ : pos_;
  }

  void on_compact(std::size_t dropped) override {
    pos_ -= dropped;
    if (chunk_open_) chunk_start_ -= dropped;
    search_hint_ = search_hint_ > dropped ? search_hint_ - dropped : 0;
  }

  void complete() override {
    const auto end = base_ + buf_.size();
    if (state_ == State::kProlog) {
      throw Error(ErrorCode::kXmlMalformed, "no root element", end);
    }
    if (state_ == State::kRoot) {
      throw Error(ErrorCode::kXmlMalformed,
                  "unexpected end of input, expected </" + names_.back() + ">",
                  end);
    }
  }

 private:
  enum class State { kProlog, kRoot, kEpilog };

  [[noreturn]] void malformed(const std::string& message, std::size_t at) {
    throw Error(ErrorCode::kXmlMalformed, message, base_ + at);
  }

  void handle(const xml::Item& item) {
    using xml::ItemKind;
    const std::string_view raw =
        std::string_view(buf_).substr(item.begin, item.end - item.begin);
    switch (state_) {
      case State::kProlog:
        switch (item.kind) {
          case ItemKind::kText:
            if (!xml::is_blank(raw)) malformed("text before root element", item.begin);
            return;
          case ItemKind::kProcessingInstruction:
            if (item.name == "xml") {
              if (item.begin != 0) {
                malformed("XML declaration must come first", item.begin);
              }
              check_encoding(raw, item.begin);
            }
            return;
          case ItemKind::kComment:
          case ItemKind::kDoctype:
            return;
          case ItemKind::kStartTag:
          case ItemKind::kEmptyTag:
            open_root(item, raw);
            return;
          default:
            malformed("unexpected markup before root element", item.begin);
        }
      case State::kRoot:
        if (!chunk_open_) {
          handle_root_child(item, raw);
        } else {
          handle_in_chunk(item);
        }
        return;
      case State::kEpilog:
        switch (item.kind) {
          case ItemKind::kText:
            if (!xml::is_blank(raw)) malformed("text after root element", item.begin);
            return;
          case ItemKind::kComment:
          case ItemKind::kProcessingInstruction:
            return;
          default:
            malformed("content after root element", item.begin);
        }
    }
  }

  void check_encoding(std::string_view decl, std::size_t at) {
    auto enc = declared_encoding(decl);
    if (!enc) return;
    std::string lower = *enc;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower != "utf-8" && lower != "utf8" && lower != "us-ascii" &&
        lower != "ascii") {
      throw Error(ErrorCode::kUnsupportedEncoding,
                  "unsupported encoding '" + *enc + "' (only UTF-8)",
                  base_ + at);
    }
  }

  void open_root(const xml::Item& item, std::string_view raw) {
    auto parents = std::make_shared<Parents>();
    parents->format = Format::kXml;
    // Nothing is dropped from the buffer before the root start tag.
    const auto prolog = rtrim(std::string_view(buf_).substr(0, item.begin));
    if (!prolog.empty()) parents->declaration = std::string(prolog);
    if (item.kind == xml::ItemKind::kEmptyTag) {
      auto head = rtrim(raw.substr(0, raw.size() - 2));
      parents->root_start = std::string(head) + ">";
      state_ = State::kEpilog;
    } else {
      parents->root_start = std::string(raw);
      state_ = State::kRoot;
      names_.emplace_back(item.name);
    }
    parents->root_end = "</" + std::string(item.name) + ">";
    file_crs_ = srs_name(item);
    parents_ = std::move(parents);
  }

  void handle_root_child(const xml::Item& item, std::string_view raw) {
    using xml::ItemKind;
    switch (item.kind) {
      case ItemKind::kText:
      case ItemKind::kComment:
      case ItemKind::kProcessingInstruction:
      case ItemKind::kCData:
        return;  // inter-chunk content is not preserved
      case ItemKind::kDoctype:
        malformed("DOCTYPE inside root element", item.begin);
      case ItemKind::kEmptyTag: {
        auto own = srs_name(item);
        emit(item.begin, item.end, parents_, own ? own : file_crs_,
             Format::kXml);
        return;
      }
      case ItemKind::kStartTag:
        chunk_open_ = true;
        chunk_start_ = item.begin;
        chunk_crs_ = srs_name(item);
        chunk_is_bounded_by_ = xml::local_name(item.name) == "boundedBy";
        names_.emplace_back(item.name);
        return;
      case ItemKind::kEndTag:
        if (item.name != names_.front()) {
          malformed("mismatched end tag </" + std::string(item.name) +
                        ">, expected </" + names_.front() + ">",
                    item.begin);
        }
        (void)raw;
        names_.pop_back();
        state_ = State::kEpilog;
        return;
    }
  }

  void handle_in_chunk(const xml::Item& item) {
    using xml::ItemKind;
    switch (item.kind) {
      case ItemKind::kStartTag:
        names_.emplace_back(item.name);
        [[fallthrough]];
      case ItemKind::kEmptyTag:
        if (!chunk_crs_) chunk_crs_ = srs_name(item);
        return;
      case ItemKind::kEndTag:
        if (item.name != names_.back()) {
          malformed("mismatched end tag </" + std::string(item.name) +
                        ">, expected </" + names_.back() + ">",
                    item.begin);
        }
        names_.pop_back();
        if (names_.size() == 1) close_chunk(item.end);
        return;
      case ItemKind::kDoctype:
        malformed("DOCTYPE inside element", item.begin);
      default:
        return;
    }
  }

  void close_chunk(std::size_t end) {
    chunk_open_ = false;
    if (chunk_is_bounded_by_ && chunk_crs_ && !file_crs_) file_crs_ = chunk_crs_;
    emit(chunk_start_, end, parents_, chunk_crs_ ? chunk_crs_ : file_crs_,
         Format::kXml);
    chunk_crs_.reset();
  }

  State state_ = State::kProlog;
  std::size_t pos_ = 0;
  std::size_t search_hint_ = 0;
  bool chunk_open_ = false;
  std::size_t chunk_start_ = 0;
  bool chunk_is_bounded_by_ = false;
  std::vector<std::string> names_;
  std::shared_ptr<const Parents> parents_;
  std::optional<std::string> file_crs_;
  std::optional<std::string> chunk_crs_;
};

// ---------------------------------------------------------------------------
// GeoJSON

bool json_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool json_digit(char c) { return c >= '0' && c <= '9'; }

bool json_hex(char c) {
  return json_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Byte-at-a-time JSON validator that tracks just enough structure to find
// feature boundaries: the top-level value, keys of the top-level object, and
// the elements of the `features` array.
class GeoJsonSplitter final : public BufferedSplitter {
 public:
  using BufferedSplitter::BufferedSplitter;

  std::optional<Format> format() const override { return Format::kGeoJson; }

 protected:
  void process(bool at_eof) override {
    const char* d = buf_.data();
    const std::size_t n = buf_.size();
    std::size_t i = pos_;
    while (i < n) {
      const char c = d[i];
      switch (st_) {
        case St::kString: {
          // Fast path through plain string bytes.
          while (i < n) {
            const char s = d[i];
            if (s == '"') {
              end_string(i);
              ++i;
              break;
            }
            if (s == '\\') {
              st_ = St::kEscape;
              ++i;
              break;
            }
            if (static_cast<unsigned char>(s) < 0x20) {
              fail("control character in string", i);
            }
            ++i;
          }
          continue;
        }
        case St::kEscape:
          if (c == 'u') {
            st_ = St::kHex;
            hex_left_ = 4;
          } else if (c == '"' || c == '\\' || c == '/' || c == 'b' ||
                     c == 'f' || c == 'n' || c == 'r' || c == 't') {
            st_ = St::kString;
          } else {
            fail("invalid escape sequence", i);
          }
          ++i;
          continue;
        case St::kHex:
          if (!json_hex(c)) fail("invalid \\u escape", i);
          if (--hex_left_ == 0) st_ = St::kString;
          ++i;
          continue;
        case St::kNumber:
          if (number_step(c)) {
            ++i;
          } else {
            if (!number_complete()) fail("incomplete number", i);
            value_end(i);  // reprocess c in the new state
          }
          continue;
        case St::kLiteral:
          if (c != literal_[literal_pos_]) fail("invalid literal", i);
          ++i;
          if (literal_[++literal_pos_] == '\0') value_end(i);
          continue;
        default:
          break;
      }
      if (json_space(c)) {
        ++i;
        continue;
      }
      switch (st_) {
        case St::kValue:
          begin_value(i, c);
          break;
        case St::kArrValueOrEnd:
          if (c == ']') {
            close_container(i);
          } else {
            begin_value(i, c);
          }
          break;
        case St::kObjKeyOrEnd:
          if (c == '}') {
            close_container(i);
          } else if (c == '"') {
            begin_key(i);
          } else {
            fail("expected object key", i);
          }
          break;
        case St::kObjKey:
          if (c != '"') fail("expected object key", i);
          begin_key(i);
          break;
        case St::kColon:
          if (c != ':') fail("expected ':'", i);
          st_ = St::kValue;
          break;
        case St::kAfterValue:
          if (stack_.back() == '{') {
            if (c == ',') {
              st_ = St::kObjKey;
            } else if (c == '}') {
              close_container(i);
            } else {
              fail("expected ',' or '}'", i);
            }
          } else {
            if (c == ',') {
              st_ = St::kValue;
            } else if (c == ']') {
              close_container(i);
            } else {
              fail("expected ',' or ']'", i);
            }
          }
          break;
        case St::kDone:
          fail("unexpected content after JSON value", i);
        default:
          break;
      }
      ++i;
    }
    pos_ = i;
    if (at_eof) {
      if (st_ == St::kNumber && number_complete()) value_end(n);
      if (!top_started_) fail("empty input", n);
      if (st_ != St::kDone) fail("unexpected end of input", n);
    }
  }

  std::size_t keep_from() const override {
    std::size_t keep = pos_;
    if (chunk_open_) keep = std::min(keep, chunk_start_);
    if (top_started_ && !collection_) keep = std::min(keep, top_start_);
    if (key_capture_) keep = std::min(keep, key_start_);
    if (crs_open_) keep = std::min(keep, crs_start_);
    return keep;
  }

  void on_compact(std::size_t dropped) override {
    pos_ -= dropped;
    if (chunk_open_) chunk_start_ -= dropped;
    if (top_started_ && !collection_) top_start_ -= dropped;
    if (key_capture_) key_start_ -= dropped;
    if (crs_open_) crs_start_ -= dropped;
  }

  void complete() override {}

 private:
  enum class St : std::uint8_t {
    kValue,
    kObjKeyOrEnd,
    kObjKey,
    kColon,
    kArrValueOrEnd,
    kAfterValue,
    kString,
    kEscape,
    kHex,
    kNumber,
    kLiteral,
    kDone,
  };
  enum class Num : std::uint8_t {
    kMinus,
    kZero,
    kInt,
    kDot,
    kFrac,
    kExp,
    kExpSign,
    kExpDigits,
  };
  enum class Member : std::uint8_t { kOther, kFeatures, kCrs };

  [[noreturn]] void fail(const std::string& message, std::size_t at) {
    throw Error(ErrorCode::kJsonMalformed, message, base_ + at);
  }

  void begin_value(std::size_t i, char c) {
    on_value_begin(i, c);
    switch (c) {
      case '{':
        stack_.push_back('{');
        st_ = St::kObjKeyOrEnd;
        return;
      case '[':
        stack_.push_back('[');
        st_ = St::kArrValueOrEnd;
        return;
      case '"':
        string_is_key_ = false;
        st_ = St::kString;
        return;
      case 't':
        start_literal("true");
        return;
      case 'f':
        start_literal("false");
        return;
      case 'n':
        start_literal("null");
        return;
      default:
        if (c == '-' || json_digit(c)) {
          st_ = St::kNumber;
          num_ = c == '-' ? Num::kMinus : c == '0' ? Num::kZero : Num::kInt;
          return;
        }
        fail(std::string("unexpected character '") + c + "'", i);
    }
  }

  void start_literal(const char* literal) {
    literal_ = literal;
    literal_pos_ = 1;
    st_ = St::kLiteral;
  }

  // Advances the number grammar; false if `c` cannot continue the number.
  bool number_step(char c) {
    const bool digit = json_digit(c);
    switch (num_) {
      case Num::kMinus:
        if (!digit) return false;
        num_ = c == '0' ? Num::kZero : Num::kInt;
        return true;
      case Num::kZero:
      case Num::kInt:
        if (digit && num_ == Num::kInt) return true;
        if (c == '.') {
          num_ = Num::kDot;
          return true;
        }
        if (c == 'e' || c == 'E') {
          num_ = Num::kExp;
          return true;
        }
        return false;
      case Num::kDot:
        if (!digit) return false;
        num_ = Num::kFrac;
        return true;
      case Num::kFrac:
        if (digit) return true;
        if (c == 'e' || c == 'E') {
          num_ = Num::kExp;
          return true;
        }
        return false;
      case Num::kExp:
        if (c == '+' || c == '-') {
          num_ = Num::kExpSign;
          return true;
        }
        [[fallthrough]];
      case Num::kExpSign:
        if (!digit) return false;
        num_ = Num::kExpDigits;
        return true;
      case Num::kExpDigits:
        return digit;
    }
    return false;
  }

  bool number_complete() const {
    return num_ == Num::kZero || num_ == Num::kInt || num_ == Num::kFrac ||
           num_ == Num::kExpDigits;
  }

  void begin_key(std::size_t i) {
    string_is_key_ = true;
    st_ = St::kString;
    if (stack_.size() == 1) {
      key_capture_ = true;
      key_start_ = i + 1;
    }
  }

  void end_string(std::size_t i) {
    if (!string_is_key_) {
      value_end(i + 1);
      return;
    }
    if (key_capture_) {
      const std::string_view key(buf_.data() + key_start_, i - key_start_);
      member_ = key == "features" ? Member::kFeatures
                : key == "crs"    ? Member::kCrs
                                  : Member::kOther;
      key_capture_ = false;
    }
    st_ = St::kColon;
  }

  void close_container(std::size_t i) {
    stack_.pop_back();
    value_end(i + 1);
  }

  void on_value_begin(std::size_t i, char c) {
    const std::size_t depth = stack_.size();
    if (depth == 0) {
      top_started_ = true;
      top_start_ = i;
      if (c == '[') {
        collection_ = true;
        in_features_ = true;
        chunk_level_ = 1;
      }
    } else if (depth == 1 && stack_.front() == '{') {
      if (member_ == Member::kFeatures && c == '[' && !collection_) {
        collection_ = true;
        in_features_ = true;
        chunk_level_ = 2;
        return;
      }
      if (member_ == Member::kCrs && !crs_open_) {
        crs_open_ = true;
        crs_start_ = i;
      }
    }
    if (in_features_ && depth == chunk_level_ && !chunk_open_) {
      chunk_open_ = true;
      chunk_start_ = i;
    }
  }

  void value_end(std::size_t end) {
    st_ = stack_.empty() ? St::kDone : St::kAfterValue;
    const std::size_t depth = stack_.size();
    if (chunk_open_ && depth == chunk_level_) {
      chunk_open_ = false;
      emit(chunk_start_, end, collection_parents(), file_crs_,
           Format::kGeoJson);
      return;
    }
    if (depth == 1 && stack_.front() == '{') {
      if (in_features_) in_features_ = false;
      if (crs_open_) {
        crs_open_ = false;
        read_crs(std::string_view(buf_).substr(crs_start_, end - crs_start_));
      }
      member_ = Member::kOther;
    } else if (depth == 0) {
      in_features_ = false;
      if (!collection_) {
        auto parents = std::make_shared<Parents>();
        parents->format = Format::kGeoJson;
        parents->kind = CollectionKind::kStandalone;
        emit(top_start_, end, std::move(parents), file_crs_, Format::kGeoJson);
        top_started_ = true;
        collection_ = true;  // nothing left to keep
      }
    }
  }

  void read_crs(std::string_view raw) {
    auto crs = nlohmann::json::parse(raw, nullptr, false);
    if (crs.is_discarded() || !crs.is_object()) return;
    auto props = crs.find("properties");
    if (props == crs.end() || !props->is_object()) return;
    auto name = props->find("name");
    if (name != props->end() && name->is_string()) {
      file_crs_ = name->get<std::string>();
    }
  }

  std::shared_ptr<const Parents> collection_parents() {
    if (!fc_parents_) {
      auto p = std::make_shared<Parents>();
      p->format = Format::kGeoJson;
      p->kind = CollectionKind::kFeatureCollection;
      fc_parents_ = std::move(p);
    }
    return fc_parents_;
  }

  St st_ = St::kValue;
  Num num_ = Num::kInt;
  bool string_is_key_ = false;
  int hex_left_ = 0;
  const char* literal_ = nullptr;
  std::size_t literal_pos_ = 0;
  std::vector<char> stack_;
  std::size_t pos_ = 0;

  bool top_started_ = false;
  std::size_t top_start_ = 0;
  bool collection_ = false;
  bool in_features_ = false;
  std::size_t chunk_level_ = 0;
  bool chunk_open_ = false;
  std::size_t chunk_start_ = 0;
  bool key_capture_ = false;
  std::size_t key_start_ = 0;
  Member member_ = Member::kOther;
  bool crs_open_ = false;
  std::size_t crs_start_ = 0;
  std::optional<std::string> file_crs_;
  std::shared_ptr<const Parents> fc_parents_;
};

// ---------------------------------------------------------------------------
// Format detection

class AutoSplitter final : public Splitter {
 public:
  explicit AutoSplitter(Sink sink) : sink_(std::move(sink)) {}

  void feed(std::string_view data) override {
    if (inner_) {
      inner_->feed(data);
      return;
    }
    head_.append(data);
    std::size_t i = head_.compare(0, 3, "\xEF\xBB\xBF") == 0 ? 3 : 0;
    while (i < head_.size() && xml::is_space(head_[i])) ++i;
    if (i == head_.size()) return;
    start();
  }

  void finish() override {
    if (!inner_) start();
    inner_->finish();
  }

  std::optional<Format> format() const override {
    return inner_ ? inner_->format() : std::nullopt;
  }

  const SplitStats& stats() const override {
    return inner_ ? inner_->stats() : empty_;
  }

 private:
  void start() {
    const Format f = detect_format(head_);
    inner_ = f == Format::kXml ? make_xml_splitter(std::move(sink_))
                               : make_geojson_splitter(std::move(sink_));
    std::string head = std::move(head_);
    head_.clear();
    inner_->feed(head);
  }

  Sink sink_;
  std::string head_;
  std::unique_ptr<Splitter> inner_;
  SplitStats empty_;
};

}  // namespace

std::unique_ptr<Splitter> make_xml_splitter(Splitter::Sink sink) {
  return std::make_unique<XmlSplitter>(std::move(sink));
}

std::unique_ptr<Splitter> make_geojson_splitter(Splitter::Sink sink) {
  return std::make_unique<GeoJsonSplitter>(std::move(sink));
}

std::unique_ptr<Splitter> make_splitter(Splitter::Sink sink) {
  return std::make_unique<AutoSplitter>(std::move(sink));
}

std::vector<RawChunk> split(std::string_view document) {
  std::vector<RawChunk> out;
  auto splitter = make_splitter([&out](RawChunk&& c) { out.push_back(std::move(c)); });
  splitter->feed(document);
  splitter->finish();
  return out;
}

SplitStats split_stream(std::istream& in, const Splitter::Sink& sink,
                        std::size_t piece_size) {
  auto splitter = make_splitter(sink);
  std::string piece(piece_size, '\0');
  while (in) {
    in.read(piece.data(), static_cast<std::streamsize>(piece.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    splitter->feed(std::string_view(piece.data(), got));
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "read error");
  splitter->finish();
  return splitter->stats();
}

}  // namespace geostore
