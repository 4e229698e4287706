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

#include "geostore/index.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fsutil.hpp"
#include "geostore/error.hpp"
#include "geostore/rtree.hpp"
#include "geostore/text.hpp"

namespace geostore {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using Slot = std::uint32_t;

constexpr std::string_view kManifestMagic = "GEOSTORE-INDEX 1";
constexpr std::string_view kSegmentMagic = "GEOSTORE-SEG 1";

class DocSet {
 public:
  explicit DocSet(std::size_t universe, bool full = false)
      : words_((universe + 63) / 64, full ? ~0ull : 0ull), universe_(universe) {
    if (full && universe % 64) words_.back() = (1ull << (universe % 64)) - 1;
  }

  void set(Slot i) { words_[i >> 6] |= 1ull << (i & 63); }
  bool test(Slot i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  DocSet& operator&=(const DocSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  DocSet& operator|=(const DocSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  DocSet& subtract(const DocSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        f(static_cast<Slot>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  std::size_t universe() const { return universe_; }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t universe_;
};

void insert_sorted(std::vector<Slot>& v, Slot s) {
  auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it == v.end() || *it != s) v.insert(it, s);
}

void erase_sorted(std::vector<Slot>& v, Slot s) {
  auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it != v.end() && *it == s) v.erase(it);
}

template <typename It>
void mark(It first, It last, DocSet& out) {
  for (; first != last; ++first) out.set(first->second);
}

template <typename Map, typename K, typename V>
void erase_pair(Map& m, const K& key, const V& s) {
  auto [first, last] = m.equal_range(key);
  for (; first != last; ++first) {
    if (first->second == s) {
      m.erase(first);
      return;
    }
  }
}

// Range of `m` whose keys satisfy `key <op> value`.
template <typename Map, typename V>
void mark_range(const Map& m, query::CompareOp op, const V& value, DocSet& out) {
  switch (op) {
    case query::CompareOp::kEq: {
      auto [a, b] = m.equal_range(value);
      mark(a, b, out);
      break;
    }
    case query::CompareOp::kLt: mark(m.begin(), m.lower_bound(value), out); break;
    case query::CompareOp::kLte: mark(m.begin(), m.upper_bound(value), out); break;
    case query::CompareOp::kGt: mark(m.upper_bound(value), m.end(), out); break;
    case query::CompareOp::kGte: mark(m.lower_bound(value), m.end(), out); break;
  }
}

// Values of one key, organised for every comparison the query language has.
struct KeyIndex {
  std::multimap<double, Slot> numbers;
  std::multimap<std::int64_t, Slot> date_lo;
  std::multimap<std::int64_t, Slot> date_hi;
  std::multimap<std::int64_t, std::pair<std::int64_t, Slot>> date_span;  // lo -> (hi, slot)
  std::int64_t max_span = 0;
  std::multimap<std::string, Slot> text_raw;    // text values
  std::multimap<std::string, Slot> text_lower;
  std::multimap<std::string, Slot> canon_raw;   // canonical text of all values
  std::multimap<std::string, Slot> canon_lower;

  void insert(const TypedValue& v, Slot s) {
    if (const auto* t = std::get_if<std::string>(&v)) {
      text_raw.emplace(*t, s);
      text_lower.emplace(text::to_lower(*t), s);
    } else if (const auto* n = std::get_if<double>(&v)) {
      numbers.emplace(*n, s);
    } else {
      const auto& d = std::get<DateValue>(v);
      date_lo.emplace(d.lower_bound(), s);
      date_hi.emplace(d.upper_bound(), s);
      date_span.emplace(d.lower_bound(), std::pair{d.upper_bound(), s});
      max_span = std::max(max_span, d.upper_bound() - d.lower_bound());
    }
    const auto canon = to_text(v);
    canon_lower.emplace(text::to_lower(canon), s);
    canon_raw.emplace(canon, s);
  }

  void erase(const TypedValue& v, Slot s) {
    if (const auto* t = std::get_if<std::string>(&v)) {
      erase_pair(text_raw, *t, s);
      erase_pair(text_lower, text::to_lower(*t), s);
    } else if (const auto* n = std::get_if<double>(&v)) {
      erase_pair(numbers, *n, s);
    } else {
      const auto& d = std::get<DateValue>(v);
      erase_pair(date_lo, d.lower_bound(), s);
      erase_pair(date_hi, d.upper_bound(), s);
      erase_pair(date_span, d.lower_bound(), std::pair{d.upper_bound(), s});
    }
    const auto canon = to_text(v);
    erase_pair(canon_lower, text::to_lower(canon), s);
    erase_pair(canon_raw, canon, s);
  }

  bool empty() const { return canon_raw.empty(); }

  static void text_match(const std::multimap<std::string, Slot>& raw,
                         const std::multimap<std::string, Slot>& lower,
                         query::CompareOp op, const std::string& value,
                         DocSet& out) {
    if (op == query::CompareOp::kEq) {
      mark_range(lower, op, text::to_lower(value), out);
    } else {
      mark_range(raw, op, value, out);
    }
  }

  void match(query::CompareOp op, const TypedValue& value, DocSet& out) const {
    using query::CompareOp;
    if (const auto* t = std::get_if<std::string>(&value)) {
      text_match(canon_raw, canon_lower, op, *t, out);
      return;
    }
    text_match(text_raw, text_lower, op, to_text(value), out);
    if (const auto* n = std::get_if<double>(&value)) {
      mark_range(numbers, op, *n, out);
      return;
    }
    const auto& d = std::get<DateValue>(value);
    const auto lo = d.lower_bound(), hi = d.upper_bound();
    switch (op) {
      case CompareOp::kLt:  // hi(doc) <= lo
        mark(date_hi.begin(), date_hi.upper_bound(lo), out);
        break;
      case CompareOp::kLte:  // lo(doc) < hi
        mark(date_lo.begin(), date_lo.lower_bound(hi), out);
        break;
      case CompareOp::kGt:  // lo(doc) >= hi
        mark(date_lo.lower_bound(hi), date_lo.end(), out);
        break;
      case CompareOp::kGte:  // hi(doc) > lo
        mark(date_hi.upper_bound(lo), date_hi.end(), out);
        break;
      case CompareOp::kEq:  // one value must overlap [lo, hi)
        for (auto it = date_span.upper_bound(lo - max_span), end = date_span.lower_bound(hi);
             it != end; ++it) {
          if (it->second.first > lo) out.set(it->second.second);
        }
        break;
    }
  }
};

// ---------------------------------------------------------------------------
// Serialization

Json typed_to_json(const TypedValue& v) {
  if (const auto* t = std::get_if<std::string>(&v)) return Json::array({"t", *t});
  if (const auto* n = std::get_if<double>(&v)) return Json::array({"n", *n});
  return Json::array({"d", std::get<DateValue>(v).str()});
}

TypedValue typed_from_json(const Json& j) {
  const auto& kind = j.at(0).get_ref<const std::string&>();
  if (kind == "t") return j.at(1).get<std::string>();
  if (kind == "n") return j.at(1).get<double>();
  auto d = DateValue::parse(j.at(1).get<std::string>());
  if (!d) throw Error(ErrorCode::kIoError, "corrupt date in index segment");
  return *d;
}

Json metadata_to_json(const ChunkMetadata& m) {
  Json j;
  j["layer"] = m.layer.str();
  j["tags"] = m.tags;
  j["props"] = m.properties;
  if (m.crs) j["crs"] = *m.crs;
  j["ts"] = m.import_timestamp;
  j["format"] = std::string(to_string(m.format));
  j["import"] = m.import_id;
  return j;
}

ChunkMetadata metadata_from_json(const Json& j) {
  ChunkMetadata m;
  m.layer = LayerPath::parse(j.at("layer").get<std::string>());
  m.tags = j.at("tags").get<std::set<std::string>>();
  m.properties = j.at("props").get<std::map<std::string, std::string>>();
  if (j.contains("crs")) m.crs = j["crs"].get<std::string>();
  m.import_timestamp = j.at("ts").get<std::int64_t>();
  m.format = parse_format(j.at("format").get<std::string>());
  m.import_id = j.at("import").get<std::string>();
  return m;
}

Json doc_to_json(const IndexDocument& d) {
  Json j;
  j["id"] = d.chunk_id.value;
  j["seq"] = d.sequence;
  if (d.bbox) {
    j["bbox"] = {d.bbox->min_x, d.bbox->min_y, d.bbox->max_x, d.bbox->max_y};
  }
  Json attrs = Json::array();
  for (const auto& a : d.attributes) attrs.push_back({a.key, typed_to_json(a.value)});
  j["attrs"] = std::move(attrs);
  j["tokens"] = d.tokens;
  j["meta"] = metadata_to_json(d.metadata);
  return j;
}

IndexDocument doc_from_json(const Json& j) {
  IndexDocument d;
  d.chunk_id.value = j.at("id").get<std::string>();
  d.sequence = j.at("seq").get<std::uint64_t>();
  if (j.contains("bbox")) {
    const auto& b = j["bbox"];
    d.bbox = BoundingBox{b.at(0).get<double>(), b.at(1).get<double>(),
                         b.at(2).get<double>(), b.at(3).get<double>()};
  }
  for (const auto& a : j.at("attrs")) {
    d.attributes.push_back({a.at(0).get<std::string>(), typed_from_json(a.at(1))});
  }
  d.tokens = j.at("tokens").get<std::vector<std::string>>();
  d.metadata = metadata_from_json(j.at("meta"));
  return d;
}

// ---------------------------------------------------------------------------
// Segment log

class SegmentLog {
 public:
  SegmentLog(fs::path dir, IndexOptions options)
      : dir_(std::move(dir)), options_(options) {
    std::error_code ec;
    fs::create_directories(dir_ / "segments", ec);
    if (ec) {
      throw Error(ErrorCode::kIoError,
                  "cannot create index directory " + dir_.string());
    }
  }

  template <typename Apply>
  void load(Apply&& apply) {
    auto manifest = fsutil::read_file(dir_ / "manifest");
    std::set<std::uint64_t> listed;
    if (manifest) {
      std::istringstream in(*manifest);
      std::string line;
      std::getline(in, line);
      if (line != kManifestMagic) {
        throw Error(ErrorCode::kIoError,
                    "unsupported index manifest header: " + line);
      }
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = Json::parse(line);
        const auto n = j.at("segment").get<std::uint64_t>();
        segments_.push_back(n);
        listed.insert(n);
        next_ = std::max(next_, n + 1);
      }
    }
    // Segments written by an interrupted commit were never listed.
    for (const auto& entry : fs::directory_iterator(dir_ / "segments")) {
      const auto stem = entry.path().stem().string();
      std::uint64_t n = 0;
      const bool numeric = entry.path().extension() == ".seg" &&
                           std::all_of(stem.begin(), stem.end(), ::isdigit) &&
                           !stem.empty();
      if (numeric) n = std::stoull(stem);
      if (!numeric || !listed.count(n)) {
        fsutil::remove_file(entry.path());
        if (numeric) next_ = std::max(next_, n + 1);
      }
    }
    for (auto n : segments_) {
      auto data = fsutil::read_file(segment_path(n));
      if (!data) {
        throw Error(ErrorCode::kIoError,
                    "index segment missing: " + segment_path(n).string());
      }
      std::istringstream in(*data);
      std::string line;
      std::getline(in, line);
      if (line != kSegmentMagic) {
        throw Error(ErrorCode::kIoError, "unsupported index segment header: " + line);
      }
      while (std::getline(in, line)) {
        if (!line.empty()) apply(Json::parse(line));
      }
    }
  }

  void commit(const std::vector<Json>& records) {
    const auto n = next_++;
    write_segment(n, records);
    segments_.push_back(n);
    write_manifest();
  }

  void replace_all(const std::vector<Json>& records) {
    const auto n = next_++;
    write_segment(n, records);
    const auto old = segments_;
    segments_ = {n};
    write_manifest();
    for (auto o : old) fsutil::remove_file(segment_path(o));
  }

  std::size_t segment_count() const { return segments_.size(); }
  const IndexOptions& options() const { return options_; }

 private:
  fs::path segment_path(std::uint64_t n) const {
    return dir_ / "segments" / (std::to_string(n) + ".seg");
  }

  void write_segment(std::uint64_t n, const std::vector<Json>& records) {
    std::string data(kSegmentMagic);
    data += '\n';
    for (const auto& r : records) {
      data += r.dump();
      data += '\n';
    }
    fsutil::write_atomic(segment_path(n), data, options_.sync);
  }

  void write_manifest() {
    std::string data(kManifestMagic);
    data += '\n';
    for (auto n : segments_) {
      data += Json{{"segment", n}}.dump();
      data += '\n';
    }
    fsutil::write_atomic(dir_ / "manifest", data, options_.sync);
  }

  fs::path dir_;
  IndexOptions options_;
  std::vector<std::uint64_t> segments_;
  std::uint64_t next_ = 1;
};

}  // namespace

// ---------------------------------------------------------------------------

struct Index::Impl {
  struct Entry {
    IndexDocument doc;
    bool live = true;
  };

  Impl() : spatial([this](const PackedRTree::Entry& e) { return slots[e.slot].live; }) {}

  mutable std::shared_mutex mu;
  // Held by a writer while it waits for `mu`, so a stream of readers cannot
  // starve it.
  mutable std::mutex gate;

  std::shared_lock<std::shared_mutex> read_lock() const {
    std::lock_guard g(gate);
    return std::shared_lock(mu);
  }
  std::unique_lock<std::shared_mutex> write_lock() const {
    std::lock_guard g(gate);
    return std::unique_lock(mu);
  }
  std::optional<SegmentLog> log;

  std::vector<Entry> slots;
  std::unordered_map<std::string, Slot> by_id;
  std::size_t dead = 0;

  std::unordered_map<std::string, std::vector<Slot>> postings;     // content
  std::unordered_map<std::string, KeyIndex> attributes;             // content
  std::multimap<std::int64_t, Slot> timestamps;
  SpatialIndex spatial;
  std::unordered_map<std::string, std::vector<Slot>> tags;         // lowercased
  std::unordered_map<std::string, std::vector<Slot>> property_tokens;
  std::unordered_map<std::string, KeyIndex> properties;

  std::size_t live_count() const { return slots.size() - dead; }

  // -- metadata-derived postings ------------------------------------------

  static std::set<std::string> lowered_tags(const ChunkMetadata& m) {
    std::set<std::string> out;
    for (const auto& t : m.tags) out.insert(text::to_lower(t));
    return out;
  }

  static std::set<std::string> property_token_set(const ChunkMetadata& m) {
    std::vector<std::string> tokens;
    for (const auto& [k, v] : m.properties) text::tokenize(v, tokens);
    return {tokens.begin(), tokens.end()};
  }

  void link_metadata(Slot s, const ChunkMetadata& m) {
    for (const auto& t : lowered_tags(m)) insert_sorted(tags[t], s);
    for (const auto& t : property_token_set(m)) insert_sorted(property_tokens[t], s);
    for (const auto& [k, v] : m.properties) properties[k].insert(parse_typed(v), s);
  }

  void unlink_metadata(Slot s, const ChunkMetadata& m) {
    for (const auto& t : lowered_tags(m)) {
      auto it = tags.find(t);
      if (it == tags.end()) continue;
      erase_sorted(it->second, s);
      if (it->second.empty()) tags.erase(it);
    }
    for (const auto& t : property_token_set(m)) {
      auto it = property_tokens.find(t);
      if (it == property_tokens.end()) continue;
      erase_sorted(it->second, s);
      if (it->second.empty()) property_tokens.erase(it);
    }
    for (const auto& [k, v] : m.properties) {
      auto it = properties.find(k);
      if (it == properties.end()) continue;
      it->second.erase(parse_typed(v), s);
      if (it->second.empty()) properties.erase(it);
    }
  }

  // -- mutation ---------------------------------------------------------------

  void insert(IndexDocument doc) {
    const auto s = static_cast<Slot>(slots.size());
    slots.push_back({std::move(doc), true});
    const auto& d = slots.back().doc;
    by_id.emplace(d.chunk_id.value, s);
    for (const auto& t : d.tokens) postings[t].push_back(s);
    for (const auto& a : d.attributes) attributes[a.key].insert(a.value, s);
    timestamps.emplace(d.metadata.import_timestamp, s);
    link_metadata(s, d.metadata);
    if (d.bbox) spatial.insert(*d.bbox, s);
  }

  bool erase(const std::string& id) {
    auto it = by_id.find(id);
    if (it == by_id.end()) return false;
    auto& e = slots[it->second];
    unlink_metadata(it->second, e.doc.metadata);
    e.live = false;
    e.doc = IndexDocument{};
    by_id.erase(it);
    ++dead;
    return true;
  }

  void replace_metadata(Slot s, ChunkMetadata m) {
    auto& e = slots[s];
    unlink_metadata(s, e.doc.metadata);
    e.doc.metadata = std::move(m);
    link_metadata(s, e.doc.metadata);
  }

  // Renumbers slots once tombstones dominate.
  void maybe_rebuild() {
    if (dead < 1024 || dead < live_count()) return;
    std::vector<Entry> old;
    old.swap(slots);
    by_id.clear();
    postings.clear();
    attributes.clear();
    timestamps.clear();
    spatial.clear();
    tags.clear();
    property_tokens.clear();
    properties.clear();
    dead = 0;
    for (auto& e : old) {
      if (e.live) insert(std::move(e.doc));
    }
  }

  void apply_record(const Json& r) {
    const auto& op = r.at("op").get_ref<const std::string&>();
    if (op == "add") {
      auto doc = doc_from_json(r.at("doc"));
      erase(doc.chunk_id.value);
      insert(std::move(doc));
    } else if (op == "meta") {
      auto it = by_id.find(r.at("id").get<std::string>());
      if (it == by_id.end()) return;
      auto m = slots[it->second].doc.metadata;
      m.tags = r.at("tags").get<std::set<std::string>>();
      m.properties = r.at("props").get<std::map<std::string, std::string>>();
      replace_metadata(it->second, std::move(m));
    } else if (op == "del") {
      erase(r.at("id").get<std::string>());
    } else {
      throw Error(ErrorCode::kIoError, "unknown index record: " + op);
    }
  }

  void commit(const std::vector<Json>& records) {
    if (!log || records.empty()) return;
    log->commit(records);
  }

  void compact_locked() {
    if (!log) return;
    std::vector<Json> records;
    records.reserve(live_count());
    for (const auto& e : slots) {
      if (e.live) records.push_back(Json{{"op", "add"}, {"doc", doc_to_json(e.doc)}});
    }
    log->replace_all(records);
  }

  void maybe_compact() {
    if (log && log->segment_count() > log->options().compact_after_segments) {
      compact_locked();
    }
  }

  // -- evaluation -------------------------------------------------------------

  DocSet live_set() const {
    DocSet out(slots.size());
    for (Slot s = 0; s < slots.size(); ++s) {
      if (slots[s].live) out.set(s);
    }
    return out;
  }

  static void mark_posting(const std::unordered_map<std::string, std::vector<Slot>>& m,
                           const std::string& key, DocSet& out) {
    auto it = m.find(key);
    if (it == m.end()) return;
    for (auto s : it->second) out.set(s);
  }

  DocSet eval_text(const std::string& token) const {
    const std::size_t n = slots.size();
    DocSet out(n);
    mark_posting(tags, text::to_lower(token), out);
    const auto wanted = text::tokenize(token);
    if (wanted.empty()) return out;
    std::optional<DocSet> all;
    for (const auto& w : wanted) {
      DocSet one(n);
      mark_posting(postings, w, one);
      mark_posting(property_tokens, w, one);
      if (all) {
        *all &= one;
      } else {
        all = std::move(one);
      }
    }
    out |= *all;
    return out;
  }

  DocSet eval(const query::Node& node, const DocSet& live) const {
    const std::size_t n = slots.size();
    return std::visit(
        [&](const auto& q) -> DocSet {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, query::MatchAll>) {
            return live;
          } else if constexpr (std::is_same_v<T, query::Term>) {
            if (const auto* t = std::get_if<query::Text>(&q.value)) {
              return eval_text(t->token);
            }
            DocSet out(n);
            if (const auto* b = std::get_if<BoundingBox>(&q.value)) {
              spatial.search(*b, [&](const PackedRTree::Entry& e) {
                const auto& d = slots[e.slot];
                if (d.live && d.doc.bbox && d.doc.bbox->intersects(*b)) out.set(e.slot);
              });
              return out;
            }
            const auto& d = std::get<DateValue>(q.value);
            mark(timestamps.lower_bound(d.lower_bound()),
                 timestamps.lower_bound(d.upper_bound()), out);
            return out;
          } else if constexpr (std::is_same_v<T, query::Comparison>) {
            DocSet out(n);
            if (auto it = attributes.find(q.key); it != attributes.end()) {
              it->second.match(q.op, q.value, out);
            }
            if (auto it = properties.find(q.key); it != properties.end()) {
              it->second.match(q.op, q.value, out);
            }
            return out;
          } else {
            switch (q.op) {
              case query::LogicalOp::kAnd: {
                DocSet out = live;
                for (const auto& c : q.children) out &= eval(c, live);
                return out;
              }
              case query::LogicalOp::kOr: {
                DocSet out(n);
                for (const auto& c : q.children) out |= eval(c, live);
                return out;
              }
              case query::LogicalOp::kNot: {
                DocSet any(n);
                for (const auto& c : q.children) any |= eval(c, live);
                DocSet out = live;
                out.subtract(any);
                return out;
              }
            }
            return DocSet(n);
          }
        },
        node.value);
  }
};

Index::Index() : impl_(std::make_unique<Impl>()) {}

Index::Index(const std::filesystem::path& dir, IndexOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->log.emplace(dir, options);
  try {
    impl_->log->load([this](const Json& r) { impl_->apply_record(r); });
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("corrupt index segment: ") + e.what());
  }
  impl_->maybe_rebuild();
}

Index::~Index() = default;

std::size_t Index::add(std::vector<IndexDocument> docs) {
  auto lock = impl_->write_lock();
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    if (impl_->by_id.count(d.chunk_id.value) || !seen.insert(d.chunk_id.value).second) {
      throw Error(ErrorCode::kDuplicateId, "chunk already indexed: " + d.chunk_id.value);
    }
  }
  if (impl_->log) {
    std::vector<Json> records;
    records.reserve(docs.size());
    for (auto& d : docs) {
      std::sort(d.tokens.begin(), d.tokens.end());
      d.tokens.erase(std::unique(d.tokens.begin(), d.tokens.end()), d.tokens.end());
      records.push_back(Json{{"op", "add"}, {"doc", doc_to_json(d)}});
    }
    impl_->commit(records);
  }
  const auto count = docs.size();
  for (auto& d : docs) {
    std::sort(d.tokens.begin(), d.tokens.end());
    d.tokens.erase(std::unique(d.tokens.begin(), d.tokens.end()), d.tokens.end());
    impl_->insert(std::move(d));
  }
  impl_->maybe_compact();
  return count;
}

std::vector<DocRef> Index::query_refs(const query::Node& q,
                                     const LayerPath& layer) const {
  auto lock = impl_->read_lock();
  const auto live = impl_->live_set();
  auto hits = impl_->eval(q, live);
  hits &= live;
  std::vector<const IndexDocument*> docs;
  hits.for_each([&](Slot s) {
    const auto& d = impl_->slots[s].doc;
    if (layer.is_root() || layer.is_ancestor_or_self_of(d.metadata.layer)) {
      docs.push_back(&d);
    }
  });
  std::sort(docs.begin(), docs.end(), [](const IndexDocument* a, const IndexDocument* b) {
    return export_order_less(*a, *b);
  });
  std::vector<DocRef> out;
  out.reserve(docs.size());
  for (const auto* d : docs) {
    out.push_back(DocRef{d->chunk_id, d->metadata.import_id, d->metadata.format});
  }
  return out;
}

std::vector<ChunkId> Index::query(const query::Node& q, const LayerPath& layer) const {
  auto refs = query_refs(q, layer);
  std::vector<ChunkId> out;
  out.reserve(refs.size());
  for (auto& r : refs) out.push_back(std::move(r.id));
  return out;
}

std::vector<std::pair<LayerPath, Format>> Index::layer_formats() const {
  auto lock = impl_->read_lock();
  std::set<std::pair<LayerPath, Format>> seen;
  for (const auto& [id, s] : impl_->by_id) {
    const auto& m = impl_->slots[s].doc.metadata;
    seen.emplace(m.layer, m.format);
  }
  return {seen.begin(), seen.end()};
}

std::size_t Index::update_metadata(const std::vector<ChunkId>& ids,
                                   const MetadataDelta& delta) {
  auto lock = impl_->write_lock();
  std::vector<Slot> targets;
  targets.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = impl_->by_id.find(id.value);
    if (it == impl_->by_id.end()) {
      throw Error(ErrorCode::kUnknownId, "chunk not indexed: " + id.value);
    }
    targets.push_back(it->second);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  std::vector<std::pair<Slot, ChunkMetadata>> changed;
  for (auto s : targets) {
    auto m = impl_->slots[s].doc.metadata;
    if (delta.apply(m)) changed.emplace_back(s, std::move(m));
  }
  if (impl_->log && !changed.empty()) {
    std::vector<Json> records;
    for (const auto& [s, m] : changed) {
      records.push_back(Json{{"op", "meta"},
                             {"id", impl_->slots[s].doc.chunk_id.value},
                             {"tags", m.tags},
                             {"props", m.properties}});
    }
    impl_->commit(records);
  }
  for (auto& [s, m] : changed) impl_->replace_metadata(s, std::move(m));
  impl_->maybe_compact();
  return changed.size();
}

std::size_t Index::remove(const std::vector<ChunkId>& ids) {
  auto lock = impl_->write_lock();
  std::vector<std::string> present;
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (impl_->by_id.count(id.value) && seen.insert(id.value).second) {
      present.push_back(id.value);
    }
  }
  if (impl_->log && !present.empty()) {
    std::vector<Json> records;
    for (const auto& id : present) records.push_back(Json{{"op", "del"}, {"id", id}});
    impl_->commit(records);
  }
  for (const auto& id : present) impl_->erase(id);
  impl_->maybe_rebuild();
  impl_->maybe_compact();
  return present.size();
}

std::optional<IndexDocument> Index::get(const ChunkId& id) const {
  auto lock = impl_->read_lock();
  auto it = impl_->by_id.find(id.value);
  if (it == impl_->by_id.end()) return std::nullopt;
  return impl_->slots[it->second].doc;
}

bool Index::contains(const ChunkId& id) const {
  auto lock = impl_->read_lock();
  return impl_->by_id.count(id.value) > 0;
}

std::size_t Index::size() const {
  auto lock = impl_->read_lock();
  return impl_->live_count();
}

std::vector<ChunkId> Index::ids() const {
  auto lock = impl_->read_lock();
  std::vector<ChunkId> out;
  out.reserve(impl_->by_id.size());
  for (const auto& [id, s] : impl_->by_id) out.push_back(ChunkId{id});
  return out;
}

std::vector<ChunkId> Index::bbox_candidates(const BoundingBox& box) const {
  auto lock = impl_->read_lock();
  std::vector<ChunkId> out;
  std::unordered_set<Slot> seen;
  impl_->spatial.search(box, [&](const PackedRTree::Entry& e) {
    if (impl_->slots[e.slot].live && seen.insert(e.slot).second) {
      out.push_back(impl_->slots[e.slot].doc.chunk_id);
    }
  });
  return out;
}

void Index::compact() {
  auto lock = impl_->write_lock();
  impl_->compact_locked();
}

std::size_t Index::segment_count() const {
  auto lock = impl_->read_lock();
  return impl_->log ? impl_->log->segment_count() : 0;
}

}  // namespace geostore
