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


#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "geostore/error.hpp"
#include "geostore/server.hpp"

namespace geostore {
namespace {

using Json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "config: " + what);
}

void check_keys(const Json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) bad("unknown key " + where + "." + k);
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    bad(std::string("bad value for ") + key);
  }
}

std::size_t read_count(const char* name, const char* text) {
  std::size_t v = 0;
  const auto* end = text + std::char_traits<char>::length(text);
  auto [p, ec] = std::from_chars(text, end, v);
  if (ec != std::errc() || p != end) bad(std::string(name) + " is not a number");
  return v;
}

}  // namespace

ServerConfig parse_server_config(std::string_view json, ServerConfig c) {
  Json root;
  try {
    root = Json::parse(json);
  } catch (const Json::parse_error& e) {
    bad(e.what());
  }
  check_keys(root, "", {"host", "port", "threads", "store", "index", "tasks", "limits"});
  read(root, "host", c.host);
  read(root, "port", c.port);
  read(root, "threads", c.threads);
  if (auto it = root.find("store"); it != root.end()) {
    check_keys(*it, "store", {"backend", "path", "syncEachWrite"});
    read(*it, "backend", c.engine.store.backend);
    std::string path = c.engine.store.path.string();
    read(*it, "path", path);
    c.engine.store.path = path;
    read(*it, "syncEachWrite", c.engine.store.sync_each_write);
  }
  if (auto it = root.find("index"); it != root.end()) {
    check_keys(*it, "index", {"path", "sync", "compactAfterSegments", "batchSize"});
    if (auto p = it->find("path"); p != it->end()) {
      if (p->is_null()) {
        c.engine.index_path.reset();
      } else {
        std::string path;
        read(*it, "path", path);
        c.engine.index_path = path;
      }
    }
    read(*it, "sync", c.engine.index_options.sync);
    read(*it, "compactAfterSegments", c.engine.index_options.compact_after_segments);
    read(*it, "batchSize", c.engine.index_batch_size);
  }
  if (auto it = root.find("tasks"); it != root.end()) {
    check_keys(*it, "tasks", {"retentionSeconds"});
    std::int64_t secs = c.engine.task_retention.count() / 1000;
    read(*it, "retentionSeconds", secs);
    c.engine.task_retention = std::chrono::seconds(secs);
  }
  if (auto it = root.find("limits"); it != root.end()) {
    check_keys(*it, "limits",
               {"maxConcurrentRequests", "maxConcurrentImports", "maxPendingIndexJobs"});
    read(*it, "maxConcurrentRequests", c.max_concurrent_requests);
    read(*it, "maxConcurrentImports", c.max_concurrent_imports);
    read(*it, "maxPendingIndexJobs", c.engine.max_pending_index_jobs);
  }
  if (c.port < 0 || c.port > 65535) bad("port out of range");
  return c;
}

ServerConfig apply_environment(ServerConfig c, const EnvLookup& env) {
  auto get = [&](const char* name) -> const char* {
    const char* v = env(name);
    return v && *v ? v : nullptr;
  };
  if (auto v = get("GEOSTORE_HOST")) c.host = v;
  if (auto v = get("GEOSTORE_PORT")) {
    const auto port = read_count("GEOSTORE_PORT", v);
    if (port > 65535) bad("GEOSTORE_PORT out of range");
    c.port = static_cast<int>(port);
  }
  if (auto v = get("GEOSTORE_STORE_BACKEND")) c.engine.store.backend = v;
  if (auto v = get("GEOSTORE_STORE_PATH")) c.engine.store.path = v;
  if (auto v = get("GEOSTORE_INDEX_PATH")) c.engine.index_path = std::filesystem::path(v);
  if (auto v = get("GEOSTORE_TASK_RETENTION")) {
    c.engine.task_retention =
        std::chrono::seconds(read_count("GEOSTORE_TASK_RETENTION", v));
  }
  if (auto v = get("GEOSTORE_MAX_REQUESTS")) {
    c.max_concurrent_requests = read_count("GEOSTORE_MAX_REQUESTS", v);
  }
  if (auto v = get("GEOSTORE_MAX_IMPORTS")) {
    c.max_concurrent_imports = read_count("GEOSTORE_MAX_IMPORTS", v);
  }
  if (auto v = get("GEOSTORE_MAX_INDEX_QUEUE")) {
    c.engine.max_pending_index_jobs = read_count("GEOSTORE_MAX_INDEX_QUEUE", v);
  }
  return c;
}

ServerConfig load_server_config(const std::optional<std::filesystem::path>& file,
                                const EnvLookup& env) {
  ServerConfig c;
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + file->string());
    std::ostringstream text;
    text << in.rdbuf();
    c = parse_server_config(text.str(), c);
  }
  return apply_environment(std::move(c), env);
}

}  // namespace geostore
