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


#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "client.hpp"
#include "geostore/error.hpp"
#include "geostore/model.hpp"
#include "geostore/params.hpp"

namespace geostore::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr const char* kDefaultUrl = "http://localhost:63020";

constexpr const char* kFooter =
    "Queries are passed to the server as one argument, unchanged. Unix shells\n"
    "treat parentheses and spaces specially, so quote every query:\n"
    "  georocket search 'AND(NOT(LTE(deleted 2018-09-13)) Köln)'\n"
    "\n"
    "Server address: --url, else $GEOSTORE_URL, else http://localhost:63020.\n"
    "Exit codes: 0 success, 1 usage error, 2 error reported by the server,\n"
    "3 connection failure.";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string store_target(const std::string& layer) {
  LayerPath path;
  try {
    path = LayerPath::parse(layer);
  } catch (const Error& e) {
    throw UsageError("invalid layer '" + layer + "': " + e.message());
  }
  std::string target = "/store";
  for (const auto& seg : path.segments()) target += "/" + url_encode(seg);
  return target;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Appends `key=value` to a target that may already carry a query string.
void add_param(std::string& target, const char* key, const std::string& value) {
  target += target.find('?') == std::string::npos ? '?' : '&';
  target += key;
  target += '=';
  target += url_encode(value);
}

std::string describe_error(const Reply& reply) {
  try {
    const auto j = Json::parse(reply.body);
    const auto& e = j.at("error");
    std::string msg = e.value("code", "ERROR") + ": " + e.value("message", "");
    if (e.contains("offset")) msg += " (at offset " + e["offset"].dump() + ")";
    return msg;
  } catch (const std::exception&) {
    return "HTTP " + std::to_string(reply.status) + ": " + reply.body;
  }
}

std::string content_type_for(const fs::path& file) {
  auto ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".gml" || ext == ".xml" || ext == ".citygml") return "application/xml";
  if (ext == ".json" || ext == ".geojson") return "application/geo+json";
  return "application/octet-stream";
}

struct Settings {
  std::string url;
  bool dry_run = false;
  std::string layer = "/";
};

struct ImportArgs {
  std::vector<std::string> files;
  std::string tags;
  std::string props;
  std::string fallback_crs;
  std::size_t parallel = 4;
};

struct FileOutcome {
  int code = kOk;
  std::string message;
  std::uint64_t chunks = 0;
};

FileOutcome import_one(Client& client, const std::string& target, const fs::path& file) {
  FileOutcome o;
  const auto reply = client.post_file(target, file, content_type_for(file));
  if (client.dry_run()) {
    client.note("GET " + client.base() + "/tasks/{task} (repeated until FINISHED or FAILED)");
    return o;
  }
  if (reply.status != 202) {
    o.code = kServerError;
    o.message = describe_error(reply);
    return o;
  }
  std::string task;
  try {
    task = Json::parse(reply.body).at("task").get<std::string>();
  } catch (const std::exception&) {
    o.code = kServerError;
    o.message = "unexpected reply: " + reply.body;
    return o;
  }
  auto delay = std::chrono::milliseconds(20);
  for (;;) {
    const auto status = client.get("/tasks/" + url_encode(task));
    if (status.status != 200) {
      o.code = kServerError;
      o.message = describe_error(status);
      return o;
    }
    const auto j = Json::parse(status.body);
    const auto state = j.value("state", "");
    if (state == "FINISHED") {
      o.chunks = j.value("chunksWritten", std::uint64_t{0});
      return o;
    }
    if (state == "FAILED") {
      o.code = kServerError;
      Reply err{status.status, Json{{"error", j.value("error", Json::object())}}.dump()};
      o.message = describe_error(err);
      return o;
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, std::chrono::milliseconds(500));
  }
}

int do_import(const Settings& s, const ImportArgs& a, std::ostream& out, std::ostream& err) {
  for (const auto& f : a.files) {
    std::error_code ec;
    if (!fs::is_regular_file(f, ec)) throw UsageError("no such file: " + f);
  }
  auto target = store_target(s.layer);
  if (!a.tags.empty()) {
    if (parse_tags(a.tags).empty()) throw UsageError("no tags given");
    add_param(target, "tags", a.tags);
  }
  if (!a.props.empty()) {
    try {
      parse_properties(a.props);
    } catch (const Error& e) {
      throw UsageError(e.message());
    }
    add_param(target, "properties", a.props);
  }
  if (!a.fallback_crs.empty()) add_param(target, "fallbackCRS", a.fallback_crs);

  const auto endpoint = parse_endpoint(s.url);
  std::vector<FileOutcome> outcomes(a.files.size());
  if (s.dry_run) {
    Client client(endpoint, &out);
    for (const auto& f : a.files) import_one(client, target, f);
    return kOk;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Client client(endpoint, nullptr);
    for (std::size_t i; (i = next.fetch_add(1)) < a.files.size();) {
      try {
        outcomes[i] = import_one(client, target, a.files[i]);
      } catch (const ConnectionError& e) {
        outcomes[i] = {kConnectionFailure, e.what(), 0};
      } catch (const std::exception& e) {
        outcomes[i] = {kServerError, e.what(), 0};
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::clamp<std::size_t>(a.parallel, 1, a.files.size());
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kOk;
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.code == kOk) {
      out << a.files[i] << ": " << o.chunks << " chunks imported\n";
    } else {
      err << a.files[i] << ": " << o.message << "\n";
      code = std::max(code, o.code);
    }
  }
  return code;
}

int do_search(const Settings& s, const std::string& query, const std::string& output,
              std::ostream& out, std::ostream& err) {
  auto target = store_target(s.layer);
  add_param(target, "search", query);
  Client client(parse_endpoint(s.url), s.dry_run ? &out : nullptr);
  std::optional<std::ofstream> file;
  auto sink = [&](std::string_view data) -> bool {
    if (output.empty()) {
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      return static_cast<bool>(out);
    }
    if (!file) {
      file.emplace(output, std::ios::binary | std::ios::trunc);
      if (!*file) return false;
    }
    file->write(data.data(), static_cast<std::streamsize>(data.size()));
    return static_cast<bool>(*file);
  };
  Reply reply;
  try {
    reply = client.get_stream(target, sink);
  } catch (...) {
    if (file) {
      file->close();
      fs::remove(output);
    }
    throw;
  }
  if (s.dry_run) return kOk;
  if (reply.status != 200) {
    err << "error: " << describe_error(reply) << "\n";
    return kServerError;
  }
  out.flush();
  return kOk;
}

int do_delete(const Settings& s, const std::string& query, bool all, std::ostream& out,
              std::ostream& err) {
  if (blank(query) && !all) {
    throw UsageError("refusing to delete with an empty query; pass --all to delete every chunk in the layer");
  }
  auto target = store_target(s.layer);
  add_param(target, "search", query);
  if (all) add_param(target, "all", "true");
  Client client(parse_endpoint(s.url), s.dry_run ? &out : nullptr);
  const auto reply = client.del(target);
  if (s.dry_run) return kOk;
  if (reply.status != 200) {
    err << "error: " << describe_error(reply) << "\n";
    return kServerError;
  }
  out << Json::parse(reply.body).value("deleted", 0) << " chunks deleted\n";
  return kOk;
}

enum class MetaOp { kSetProps, kRemoveProps, kAddTags, kRemoveTags };

int do_metadata(const Settings& s, MetaOp op, const std::string& value, const std::string& query,
                std::ostream& out, std::ostream& err) {
  try {
    switch (op) {
      case MetaOp::kSetProps: parse_properties(value); break;
      case MetaOp::kRemoveProps:
        if (parse_property_keys(value).empty()) throw UsageError("no property keys given");
        break;
      case MetaOp::kAddTags:
      case MetaOp::kRemoveTags:
        if (parse_tags(value).empty()) throw UsageError("no tags given");
        break;
    }
  } catch (const Error& e) {
    throw UsageError(e.message());
  }
  const bool props = op == MetaOp::kSetProps || op == MetaOp::kRemoveProps;
  auto target = store_target(s.layer);
  add_param(target, "search", query);
  add_param(target, props ? "properties" : "tags", value);
  Client client(parse_endpoint(s.url), s.dry_run ? &out : nullptr);
  const bool removing = op == MetaOp::kRemoveProps || op == MetaOp::kRemoveTags;
  const auto reply = removing ? client.del(target) : client.put(target);
  if (s.dry_run) return kOk;
  if (reply.status != 200) {
    err << "error: " << describe_error(reply) << "\n";
    return kServerError;
  }
  out << Json::parse(reply.body).value("affected", 0) << " chunks affected\n";
  return kOk;
}

// The documented syntax uses single-dash long options (`-props`).
std::string normalize_flag(const std::string& arg) {
  for (const char* name : {"props", "tags", "layer"}) {
    if (arg == std::string("-") + name) return std::string("--") + name;
  }
  return arg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  CLI::App app{"Command-line client for the geostore server", "georocket"};
  app.footer(kFooter);
  app.require_subcommand(1);
  // Lets global flags follow the subcommand too.
  app.fallthrough();

  Settings s;
  app.add_option("--url", s.url, "Server URL");
  app.add_flag("--dry-run", s.dry_run, "Print the HTTP requests instead of sending them");

  auto layer_option = [&](CLI::App* cmd) {
    cmd->add_option("-l,--layer", s.layer, "Layer path (default /)");
  };

  ImportArgs imp;
  auto* import_cmd = app.add_subcommand("import", "Import files into a layer");
  import_cmd->add_option("files", imp.files, "Files to import")->required();
  layer_option(import_cmd);
  import_cmd->add_option("-t,--tags", imp.tags, "Comma-separated tags for every chunk");
  import_cmd->add_option("-p,--props", imp.props, "Comma-separated key:value properties");
  import_cmd->add_option("--fallback-crs", imp.fallback_crs,
                         "CRS for chunks that do not declare one");
  import_cmd->add_option("--parallel", imp.parallel, "Concurrent uploads")
      ->check(CLI::PositiveNumber);

  std::string query, output;
  auto* search_cmd = app.add_subcommand("search", "Export chunks matching a query");
  search_cmd->add_option("query", query, "Query (empty string for all)")->required();
  layer_option(search_cmd);
  search_cmd->add_option("-o,--output", output, "Write to a file instead of standard output");

  bool all = false;
  auto* delete_cmd = app.add_subcommand("delete", "Delete chunks matching a query");
  delete_cmd->add_option("query", query, "Query")->required();
  layer_option(delete_cmd);
  delete_cmd->add_flag("--all", all, "Allow an empty query (deletes the whole layer)");

  std::string value;
  auto* property_cmd = app.add_subcommand("property", "Change chunk properties");
  property_cmd->require_subcommand(1);
  auto* prop_set = property_cmd->add_subcommand("set", "Set properties (key:value,...)");
  auto* prop_rm = property_cmd->add_subcommand("rm", "Remove properties (key,...)");
  for (auto* cmd : {prop_set, prop_rm}) {
    cmd->add_option("-p,--props", value, "Properties")->required();
    cmd->add_option("query", query, "Query selecting the chunks")->required();
    layer_option(cmd);
  }

  auto* tag_cmd = app.add_subcommand("tag", "Change chunk tags");
  tag_cmd->require_subcommand(1);
  auto* tag_add = tag_cmd->add_subcommand("add", "Add tags");
  auto* tag_rm = tag_cmd->add_subcommand("rm", "Remove tags");
  for (auto* cmd : {tag_add, tag_rm}) {
    cmd->add_option("-t,--tags", value, "Comma-separated tags")->required();
    cmd->add_option("query", query, "Query selecting the chunks")->required();
    layer_option(cmd);
  }

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    argv_store.push_back(i == 0 ? args[i] : normalize_flag(args[i]));
  }
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (s.url.empty()) {
    const char* from_env = env("GEOSTORE_URL");
    s.url = from_env && *from_env ? from_env : kDefaultUrl;
  }

  try {
    parse_endpoint(s.url);
    if (*import_cmd) return do_import(s, imp, out, err);
    if (*search_cmd) return do_search(s, query, output, out, err);
    if (*delete_cmd) return do_delete(s, query, all, out, err);
    if (*prop_set) return do_metadata(s, MetaOp::kSetProps, value, query, out, err);
    if (*prop_rm) return do_metadata(s, MetaOp::kRemoveProps, value, query, out, err);
    if (*tag_add) return do_metadata(s, MetaOp::kAddTags, value, query, out, err);
    if (*tag_rm) return do_metadata(s, MetaOp::kRemoveTags, value, query, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConnectionError& e) {
    err << "error: " << e.what() << "\n";
    return kConnectionFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kServerError;
  }
  return kUsage;
}

}  // namespace geostore::cli
