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

#include "geostore/model.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace geostore {

// ---------------------------------------------------------------------------
// Error

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedPath: return "MALFORMED_PATH";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kMalformedBbox: return "MALFORMED_BBOX";
    case ErrorCode::kUnsupportedFormat: return "UNSUPPORTED_FORMAT";
    case ErrorCode::kUnsupportedEncoding: return "UNSUPPORTED_ENCODING";
    case ErrorCode::kXmlMalformed: return "XML_MALFORMED";
    case ErrorCode::kJsonMalformed: return "JSON_MALFORMED";
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kUnknownId: return "UNKNOWN_ID";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kIncompatibleParents: return "INCOMPATIBLE_PARENTS";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kOverloaded: return "OVERLOADED";
  }
  return "UNKNOWN";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     const std::optional<std::uint64_t>& offset) {
  std::string out(to_string(code));
  if (offset) out += " at offset " + std::to_string(*offset);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::uint64_t> offset)
    : std::runtime_error(decorate(code, message, offset)),
      code_(code),
      offset_(offset),
      message_(message) {}

// ---------------------------------------------------------------------------
// Format

std::string_view to_string(Format format) {
  return format == Format::kXml ? "XML" : "GEOJSON";
}

Format parse_format(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "XML") return Format::kXml;
  if (upper == "GEOJSON") return Format::kGeoJson;
  throw Error(ErrorCode::kUnsupportedFormat,
              "unknown format '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// ChunkId

ChunkId ChunkId::generate() {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const auto ms = static_cast<unsigned long long>(now_millis());
  const auto n = counter.fetch_add(1, std::memory_order_relaxed);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%012llx%06llx%08llx", ms & 0xffffffffffffULL,
                static_cast<unsigned long long>(n & 0xffffff),
                static_cast<unsigned long long>(rng() & 0xffffffffULL));
  return ChunkId{buf};
}

// ---------------------------------------------------------------------------
// LayerPath

namespace {

bool has_control_char(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x20 || c == 0x7f) return true;
    // C1 controls U+0080..U+009F encoded as C2 80..C2 9F
    if (c == 0xc2 && i + 1 < s.size()) {
      const auto d = static_cast<unsigned char>(s[i + 1]);
      if (d >= 0x80 && d <= 0x9f) return true;
    }
  }
  return false;
}

void check_segment(const std::string& segment) {
  if (segment.empty()) {
    throw Error(ErrorCode::kMalformedPath, "empty layer segment");
  }
  if (segment.find('/') != std::string::npos) {
    throw Error(ErrorCode::kMalformedPath,
                "layer segment contains '/': " + segment);
  }
  if (has_control_char(segment)) {
    throw Error(ErrorCode::kMalformedPath,
                "layer segment contains a control character");
  }
}

}  // namespace

LayerPath::LayerPath(std::vector<std::string> segments)
    : segments_(std::move(segments)) {
  for (const auto& s : segments_) check_segment(s);
}

LayerPath LayerPath::parse(std::string_view text) {
  std::vector<std::string> segments;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('/', pos);
    if (next == std::string_view::npos) next = text.size();
    if (next > pos) segments.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return LayerPath(std::move(segments));
}

std::string LayerPath::str() const {
  if (segments_.empty()) return "/";
  std::string out;
  for (const auto& s : segments_) {
    out += '/';
    out += s;
  }
  return out;
}

bool LayerPath::is_ancestor_or_self_of(const LayerPath& other) const noexcept {
  if (segments_.size() > other.segments_.size()) return false;
  return std::equal(segments_.begin(), segments_.end(),
                    other.segments_.begin());
}

LayerPath LayerPath::child(std::string segment) const {
  auto segments = segments_;
  segments.push_back(std::move(segment));
  return LayerPath(std::move(segments));
}

// ---------------------------------------------------------------------------
// BoundingBox

BoundingBox BoundingBox::make(double min_x, double min_y, double max_x,
                              double max_y) {
  for (double v : {min_x, min_y, max_x, max_y}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bounding box component is not finite");
    }
  }
  if (min_x > max_x || min_y > max_y) {
    throw Error(ErrorCode::kInvalidArgument,
                "bounding box minimum exceeds maximum");
  }
  return {min_x, min_y, max_x, max_y};
}

void BoundingBox::expand(double x, double y) noexcept {
  min_x = std::min(min_x, x);
  min_y = std::min(min_y, y);
  max_x = std::max(max_x, x);
  max_y = std::max(max_y, y);
}

void BoundingBox::expand(const BoundingBox& other) noexcept {
  expand(other.min_x, other.min_y);
  expand(other.max_x, other.max_y);
}

std::optional<BoundingBox> bounding_box_of(
    std::span<const std::pair<double, double>> points) {
  std::optional<BoundingBox> box;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (!box) {
      box = BoundingBox::point(x, y);
    } else {
      box->expand(x, y);
    }
  }
  return box;
}

// ---------------------------------------------------------------------------
// DateValue

namespace {

constexpr std::int64_t kMillisPerDay = 86'400'000;

// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

// Reads exactly `n` ASCII digits at `pos`.
std::optional<int> digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

std::optional<DateValue> DateValue::parse(std::string_view s) {
  DateValue d;
  auto year = digits(s, 0, 4);
  if (!year) return std::nullopt;
  d.year_ = *year;
  d.granularity_ = Granularity::kYear;
  if (s.size() == 4) return d;

  if (s[4] != '-') return std::nullopt;
  auto month = digits(s, 5, 2);
  if (!month || *month < 1 || *month > 12) return std::nullopt;
  d.month_ = *month;
  d.granularity_ = Granularity::kMonth;
  if (s.size() == 7) return d;

  if (s[7] != '-') return std::nullopt;
  auto day = digits(s, 8, 2);
  if (!day || *day < 1 || *day > days_in_month(d.year_, d.month_)) {
    return std::nullopt;
  }
  d.day_ = *day;
  d.granularity_ = Granularity::kDay;
  if (s.size() == 10) return d;

  if (s[10] != 'T' && s[10] != 't') return std::nullopt;
  auto hour = digits(s, 11, 2);
  if (!hour || *hour > 23 || s.size() < 16 || s[13] != ':') return std::nullopt;
  auto minute = digits(s, 14, 2);
  if (!minute || *minute > 59) return std::nullopt;
  d.hour_ = *hour;
  d.minute_ = *minute;
  d.granularity_ = Granularity::kMinute;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    auto second = digits(s, pos + 1, 2);
    if (!second || *second > 59) return std::nullopt;
    d.second_ = *second;
    d.granularity_ = Granularity::kSecond;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      int millis = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        if (pos - start < 3) millis = millis * 10 + (s[pos] - '0');
        ++pos;
      }
      const std::size_t n = pos - start;
      if (n == 0) return std::nullopt;
      for (std::size_t i = n; i < 3; ++i) millis *= 10;
      d.millis_ = millis;
      d.granularity_ = Granularity::kMillisecond;
    }
  }
  if (pos == s.size()) return d;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    if (pos + 1 != s.size()) return std::nullopt;
    d.zone_minutes_ = 0;
    return d;
  }
  if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
  const int sign = s[pos] == '-' ? -1 : 1;
  auto zh = digits(s, pos + 1, 2);
  if (!zh || *zh > 23) return std::nullopt;
  std::size_t zpos = pos + 3;
  if (zpos < s.size() && s[zpos] == ':') ++zpos;
  auto zm = digits(s, zpos, 2);
  if (!zm || *zm > 59 || zpos + 2 != s.size()) return std::nullopt;
  d.zone_minutes_ = sign * (*zh * 60 + *zm);
  return d;
}

DateValue DateValue::year(int y) {
  DateValue d;
  d.year_ = y;
  d.granularity_ = Granularity::kYear;
  return d;
}

DateValue DateValue::from_epoch_millis(std::int64_t ms) {
  std::int64_t days = ms / kMillisPerDay;
  std::int64_t rem = ms % kMillisPerDay;
  if (rem < 0) {
    rem += kMillisPerDay;
    --days;
  }
  const auto civil = civil_from_days(days);
  DateValue d;
  d.year_ = static_cast<int>(civil.year);
  d.month_ = static_cast<int>(civil.month);
  d.day_ = static_cast<int>(civil.day);
  d.hour_ = static_cast<int>(rem / 3'600'000);
  d.minute_ = static_cast<int>(rem / 60'000 % 60);
  d.second_ = static_cast<int>(rem / 1000 % 60);
  d.millis_ = static_cast<int>(rem % 1000);
  d.zone_minutes_ = 0;
  d.granularity_ = Granularity::kMillisecond;
  return d;
}

std::optional<int> DateValue::month() const {
  if (granularity_ == Granularity::kYear) return std::nullopt;
  return month_;
}

std::optional<int> DateValue::day() const {
  if (granularity_ == Granularity::kYear || granularity_ == Granularity::kMonth) {
    return std::nullopt;
  }
  return day_;
}

std::int64_t DateValue::lower_bound() const noexcept {
  const std::int64_t days = days_from_civil(year_, month_, day_);
  std::int64_t ms = days * kMillisPerDay +
                    ((hour_ * 60LL + minute_) * 60 + second_) * 1000 + millis_;
  if (zone_minutes_) ms -= *zone_minutes_ * 60'000LL;
  return ms;
}

std::int64_t DateValue::upper_bound() const noexcept {
  switch (granularity_) {
    case Granularity::kYear:
      return days_from_civil(year_ + 1, 1, 1) * kMillisPerDay;
    case Granularity::kMonth:
      return (month_ == 12 ? days_from_civil(year_ + 1, 1, 1)
                           : days_from_civil(year_, month_ + 1, 1)) *
             kMillisPerDay;
    case Granularity::kDay:
      return lower_bound() + kMillisPerDay;
    case Granularity::kMinute:
      return lower_bound() + 60'000;
    case Granularity::kSecond:
      return lower_bound() + 1000;
    case Granularity::kMillisecond:
      return lower_bound() + 1;
  }
  return lower_bound() + 1;
}

std::string DateValue::str() const {
  char buf[48];
  switch (granularity_) {
    case Granularity::kYear:
      std::snprintf(buf, sizeof buf, "%04d", year_);
      return buf;
    case Granularity::kMonth:
      std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
      return buf;
    case Granularity::kDay:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year_, month_, day_);
      return buf;
    case Granularity::kMinute:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", year_, month_,
                    day_, hour_, minute_);
      break;
    case Granularity::kSecond:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", year_,
                    month_, day_, hour_, minute_, second_);
      break;
    case Granularity::kMillisecond:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03d",
                    year_, month_, day_, hour_, minute_, second_, millis_);
      break;
  }
  std::string out = buf;
  if (zone_minutes_) {
    if (*zone_minutes_ == 0) {
      out += 'Z';
    } else {
      const int z = std::abs(*zone_minutes_);
      std::snprintf(buf, sizeof buf, "%c%02d:%02d",
                    *zone_minutes_ < 0 ? '-' : '+', z / 60, z % 60);
      out += buf;
    }
  }
  return out;
}

std::string format_timestamp(std::int64_t epoch_ms) {
  return DateValue::from_epoch_millis(epoch_ms).str();
}

std::int64_t now_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// TypedValue

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;  // from_chars rejects a leading plus
  double value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  // from_chars accepts "inf"/"nan" spellings and hex-less forms only; reject
  // anything that does not start like a decimal literal.
  const char c = *first;
  if (!((c >= '0' && c <= '9') || c == '-' || c == '.')) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

TypedValue parse_typed(std::string_view text) {
  if (auto d = DateValue::parse(text)) return *d;
  if (auto n = parse_number(text)) return *n;
  return std::string(text);
}

std::string to_text(const TypedValue& value) {
  switch (value.index()) {
    case 0: return std::get<std::string>(value);
    case 1: return format_number(std::get<double>(value));
    default: return std::get<DateValue>(value).str();
  }
}

// ---------------------------------------------------------------------------
// MetadataDelta

bool MetadataDelta::apply(ChunkMetadata& meta) const {
  bool changed = false;
  for (const auto& key : remove_properties) {
    changed |= meta.properties.erase(key) > 0;
  }
  for (const auto& [key, value] : set_properties) {
    auto [it, inserted] = meta.properties.try_emplace(key, value);
    if (!inserted && it->second != value) {
      it->second = value;
      changed = true;
    }
    changed |= inserted;
  }
  for (const auto& tag : remove_tags) changed |= meta.tags.erase(tag) > 0;
  for (const auto& tag : add_tags) changed |= meta.tags.insert(tag).second;
  return changed;
}

}  // namespace geostore
