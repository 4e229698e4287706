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

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "fsutil.hpp"
#include "geostore/error.hpp"
#include "geostore/store.hpp"

namespace geostore {

std::string percent_encode(std::string_view raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c <= 0x20 || c == '%' || c == 0x7F) {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string percent_decode(std::string_view encoded) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw Error(ErrorCode::kIoError, "malformed escape in sidecar");
  };
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out += encoded[i];
      continue;
    }
    if (i + 2 >= encoded.size()) {
      throw Error(ErrorCode::kIoError, "truncated escape in sidecar");
    }
    out += static_cast<char>(nibble(encoded[i + 1]) * 16 + nibble(encoded[i + 2]));
    i += 2;
  }
  return out;
}

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kVersion = "v1";

std::string file_name(std::string_view raw) {
  auto enc = percent_encode(raw);
  // "/" cannot occur in layer segments or ids; leading dots would clash with
  // "." and "..".
  if (!enc.empty() && enc.front() == '.') enc.replace(0, 1, "%2E");
  std::string out;
  for (char c : enc) {
    if (c == '/') {
      out += "%2F";
    } else {
      out += c;
    }
  }
  return out;
}

// "key field field ..." lines; fields are percent-encoded.
std::vector<std::pair<std::string, std::vector<std::string>>> parse_lines(
    const std::string& text, const fs::path& path) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != kVersion) {
    throw Error(ErrorCode::kIoError, "unsupported record version in " + path.string());
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      auto next = line.find(' ', pos);
      if (next == std::string::npos) next = line.size();
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    std::string key = fields.front();
    fields.erase(fields.begin());
    for (auto& f : fields) f = percent_decode(f);
    out.emplace_back(std::move(key), std::move(fields));
  }
  return out;
}

void line(std::string& out, std::string_view key,
          std::initializer_list<std::string_view> fields) {
  out += key;
  for (auto f : fields) {
    out += ' ';
    out += percent_encode(f);
  }
  out += '\n';
}

std::string encode_meta(const ChunkMetadata& m, std::uint64_t sequence) {
  std::string out(kVersion);
  out += '\n';
  line(out, "layer", {m.layer.str()});
  line(out, "import", {m.import_id});
  line(out, "format", {to_string(m.format)});
  line(out, "sequence", {std::to_string(sequence)});
  line(out, "timestamp", {std::to_string(m.import_timestamp)});
  if (m.crs) line(out, "crs", {*m.crs});
  for (const auto& t : m.tags) line(out, "tag", {t});
  for (const auto& [k, v] : m.properties) line(out, "prop", {k, v});
  return out;
}

std::pair<ChunkMetadata, std::uint64_t> decode_meta(const std::string& text,
                                                    const fs::path& path) {
  ChunkMetadata m;
  std::uint64_t sequence = 0;
  auto need = [&](const std::vector<std::string>& f, std::size_t n) {
    if (f.size() != n) throw Error(ErrorCode::kIoError, "malformed sidecar " + path.string());
  };
  try {
    for (const auto& [key, f] : parse_lines(text, path)) {
      if (key == "layer") {
        need(f, 1);
        m.layer = LayerPath::parse(f[0]);
      } else if (key == "import") {
        need(f, 1);
        m.import_id = f[0];
      } else if (key == "format") {
        need(f, 1);
        m.format = parse_format(f[0]);
      } else if (key == "sequence") {
        need(f, 1);
        sequence = std::stoull(f[0]);
      } else if (key == "timestamp") {
        need(f, 1);
        m.import_timestamp = std::stoll(f[0]);
      } else if (key == "crs") {
        need(f, 1);
        m.crs = f[0];
      } else if (key == "tag") {
        need(f, 1);
        m.tags.insert(f[0]);
      } else if (key == "prop") {
        need(f, 2);
        m.properties[f[0]] = f[1];
      }
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kIoError, "malformed sidecar " + path.string());
  }
  return {std::move(m), sequence};
}

std::string encode_parents(const Parents& p) {
  std::string out(kVersion);
  out += '\n';
  line(out, "format", {to_string(p.format)});
  line(out, "kind", {p.kind == CollectionKind::kStandalone ? "standalone" : "collection"});
  if (p.declaration) line(out, "declaration", {*p.declaration});
  line(out, "root_start", {p.root_start});
  line(out, "root_end", {p.root_end});
  return out;
}

std::shared_ptr<const Parents> decode_parents(const std::string& text,
                                              const fs::path& path) {
  auto p = std::make_shared<Parents>();
  for (const auto& [key, f] : parse_lines(text, path)) {
    if (f.size() != 1) throw Error(ErrorCode::kIoError, "malformed parents " + path.string());
    if (key == "format") {
      p->format = parse_format(f[0]);
    } else if (key == "kind") {
      p->kind = f[0] == "standalone" ? CollectionKind::kStandalone
                                     : CollectionKind::kFeatureCollection;
    } else if (key == "declaration") {
      p->declaration = f[0];
    } else if (key == "root_start") {
      p->root_start = f[0];
    } else if (key == "root_end") {
      p->root_end = f[0];
    }
  }
  return p;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

class FilesystemStore final : public ChunkStore {
 public:
  FilesystemStore(fs::path root, bool sync_each_write)
      : root_(std::move(root)), sync_(sync_each_write) {
    std::error_code ec;
    for (const char* d : {"store", "parents", "imports"}) {
      fs::create_directories(root_ / d, ec);
      if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (root_ / d).string());
    }
    load();
  }

  void put(const StoredEntry& entry) override {
    std::lock_guard stripe(stripe_for(entry.id));
    {
      std::shared_lock lock(map_mu_);
      if (dirs_.count(entry.id.value)) {
        throw Error(ErrorCode::kDuplicateId, "chunk exists: " + entry.id.value);
      }
    }
    store_parents(entry.metadata.import_id, entry.parents);
    const auto dir = layer_dir(entry.metadata.layer);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
    fsutil::write_atomic(dir / (entry.id.value + ".chunk"), entry.content, sync_);
    fsutil::write_atomic(dir / (entry.id.value + ".meta"),
                         encode_meta(entry.metadata, entry.sequence), sync_);
    std::unique_lock lock(map_mu_);
    dirs_.emplace(entry.id.value, dir);
  }

  StoredEntry get(const ChunkId& id) const override {
    std::lock_guard stripe(stripe_for(id));
    const auto dir = find(id);
    StoredEntry e;
    e.id = id;
    auto [meta, seq] = read_meta(dir, id);
    e.metadata = std::move(meta);
    e.sequence = seq;
    auto content = fsutil::read_file(dir / (id.value + ".chunk"));
    if (!content) throw Error(ErrorCode::kIoError, "chunk content missing: " + id.value);
    e.content = std::move(*content);
    e.parents = load_parents(e.metadata.import_id);
    return e;
  }

  ChunkMetadata get_metadata(const ChunkId& id) const override {
    std::lock_guard stripe(stripe_for(id));
    return read_meta(find(id), id).first;
  }

  std::size_t remove(const std::vector<ChunkId>& ids) override {
    std::size_t n = 0;
    for (const auto& id : ids) {
      std::lock_guard stripe(stripe_for(id));
      fs::path dir;
      {
        std::shared_lock lock(map_mu_);
        auto it = dirs_.find(id.value);
        if (it == dirs_.end()) continue;
        dir = it->second;
      }
      fsutil::remove_file(dir / (id.value + ".meta"));
      fsutil::remove_file(dir / (id.value + ".chunk"));
      std::unique_lock lock(map_mu_);
      dirs_.erase(id.value);
      ++n;
    }
    return n;
  }

  bool update_metadata(const ChunkId& id, const MetadataDelta& delta) override {
    std::lock_guard stripe(stripe_for(id));
    const auto dir = find(id);
    auto [meta, seq] = read_meta(dir, id);
    if (!delta.apply(meta)) return false;
    fsutil::write_atomic(dir / (id.value + ".meta"), encode_meta(meta, seq), sync_);
    return true;
  }

  void scan(const std::function<void(const ChunkId&)>& visit) const override {
    std::vector<ChunkId> ids;
    {
      std::shared_lock lock(map_mu_);
      ids.reserve(dirs_.size());
      for (const auto& [id, dir] : dirs_) ids.push_back(ChunkId{id});
    }
    for (const auto& id : ids) visit(id);
  }

  std::size_t size() const override {
    std::shared_lock lock(map_mu_);
    return dirs_.size();
  }

  std::shared_ptr<const Parents> get_parents(const std::string& import_id) const override {
    return load_parents(import_id);
  }

  void begin_import(const std::string& import_id) override {
    fsutil::write_atomic(root_ / "imports" / file_name(import_id), import_id, true);
  }

  void end_import(const std::string& import_id) override {
    fsutil::remove_file(root_ / "imports" / file_name(import_id));
    if (!sync_) fsutil::sync_directory(root_ / "imports");
  }

  std::vector<std::string> pending_imports() const override {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(root_ / "imports")) {
      const auto name = e.path().filename().string();
      if (name.find(".tmp.") != std::string::npos) continue;
      if (auto id = fsutil::read_file(e.path())) out.push_back(*id);
    }
    return out;
  }

  void sync() override {
    const int fd = ::open(root_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd < 0) throw Error(ErrorCode::kIoError, "cannot open " + root_.string());
    const int rc = ::syncfs(fd);
    ::close(fd);
    if (rc != 0) throw Error(ErrorCode::kIoError, "syncfs failed for " + root_.string());
  }

 private:
  static constexpr std::size_t kStripes = 64;

  std::mutex& stripe_for(const ChunkId& id) const {
    return stripes_[std::hash<std::string>{}(id.value) % kStripes];
  }

  fs::path layer_dir(const LayerPath& layer) const {
    fs::path dir = root_ / "store";
    for (const auto& seg : layer.segments()) dir /= file_name(seg);
    return dir;
  }

  fs::path find(const ChunkId& id) const {
    std::shared_lock lock(map_mu_);
    auto it = dirs_.find(id.value);
    if (it == dirs_.end()) throw Error(ErrorCode::kNotFound, "no chunk " + id.value);
    return it->second;
  }

  std::pair<ChunkMetadata, std::uint64_t> read_meta(const fs::path& dir,
                                                    const ChunkId& id) const {
    const auto path = dir / (id.value + ".meta");
    auto text = fsutil::read_file(path);
    if (!text) throw Error(ErrorCode::kNotFound, "no chunk " + id.value);
    return decode_meta(*text, path);
  }

  void store_parents(const std::string& import_id,
                     const std::shared_ptr<const Parents>& parents) {
    std::lock_guard lock(parents_mu_);
    if (parents_.count(import_id)) return;
    const auto path = root_ / "parents" / file_name(import_id);
    if (!fs::exists(path)) {
      const Parents empty;
      fsutil::write_atomic(path, encode_parents(parents ? *parents : empty), sync_);
    }
    parents_.emplace(import_id, parents ? parents : load_parents_locked(import_id));
  }

  std::shared_ptr<const Parents> load_parents(const std::string& import_id) const {
    std::lock_guard lock(parents_mu_);
    return load_parents_locked(import_id);
  }

  std::shared_ptr<const Parents> load_parents_locked(const std::string& import_id) const {
    if (auto it = parents_.find(import_id); it != parents_.end()) return it->second;
    const auto path = root_ / "parents" / file_name(import_id);
    auto text = fsutil::read_file(path);
    if (!text) return nullptr;
    auto p = decode_parents(*text, path);
    parents_.emplace(import_id, p);
    return p;
  }

  void load() {
    std::vector<fs::path> orphans;
    for (auto it = fs::recursive_directory_iterator(root_ / "store");
         it != fs::recursive_directory_iterator(); ++it) {
      if (!it->is_regular_file()) continue;
      const auto name = it->path().filename().string();
      if (name.find(".tmp.") != std::string::npos) {
        orphans.push_back(it->path());
      } else if (ends_with(name, ".meta")) {
        dirs_.emplace(name.substr(0, name.size() - 5), it->path().parent_path());
      }
    }
    // Content whose sidecar was never written belongs to an interrupted put.
    for (auto it = fs::recursive_directory_iterator(root_ / "store");
         it != fs::recursive_directory_iterator(); ++it) {
      if (!it->is_regular_file()) continue;
      const auto name = it->path().filename().string();
      if (ends_with(name, ".chunk") &&
          !dirs_.count(name.substr(0, name.size() - 6))) {
        orphans.push_back(it->path());
      }
    }
    for (const auto& p : orphans) fsutil::remove_file(p);
    for (const char* d : {"parents", "imports"}) {
      for (const auto& e : fs::directory_iterator(root_ / d)) {
        if (e.path().filename().string().find(".tmp.") != std::string::npos) {
          fsutil::remove_file(e.path());
        }
      }
    }
  }

  fs::path root_;
  bool sync_;
  mutable std::array<std::mutex, kStripes> stripes_;
  mutable std::shared_mutex map_mu_;
  std::unordered_map<std::string, fs::path> dirs_;
  mutable std::mutex parents_mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const Parents>> parents_;
};

}  // namespace

std::unique_ptr<ChunkStore> make_filesystem_store(const std::filesystem::path& root,
                                                  bool sync_each_write) {
  return std::make_unique<FilesystemStore>(root, sync_each_write);
}

std::unique_ptr<ChunkStore> make_store(const StoreConfig& config) {
  if (config.backend == "memory") return make_memory_store();
  if (config.backend == "filesystem") {
    if (config.path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "store.path is required for the filesystem backend");
    }
    return make_filesystem_store(config.path, config.sync_each_write);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown store backend: " + config.backend);
}

}  // namespace geostore
