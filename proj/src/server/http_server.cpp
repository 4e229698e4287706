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


#include <atomic>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

#include "geostore/error.hpp"
#include "geostore/params.hpp"
#include "geostore/server.hpp"

namespace geostore {
namespace {

using Json = nlohmann::json;
using httplib::Request;
using httplib::Response;

constexpr std::string_view kVersion = "1.0.0";
constexpr std::size_t kStreamBuffer = 64 * 1024;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedPath:
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownId:
      return 404;
    case ErrorCode::kIncompatibleParents:
      return 409;
    case ErrorCode::kOverloaded:
      return 503;
    case ErrorCode::kDuplicateId:
    case ErrorCode::kIoError:
      return 500;
    default:
      return 400;
  }
}

Json error_body(std::string_view code, const std::string& message,
                std::optional<std::uint64_t> offset) {
  Json e{{"code", code}, {"message", message}};
  if (offset) e["offset"] = *offset;
  return Json{{"error", e}};
}

void send_json(Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, const Error& err, Json extra = Json::object()) {
  auto body = error_body(to_string(err.code()), err.message(), err.offset());
  for (auto& [k, v] : extra.items()) body[k] = v;
  if (err.code() == ErrorCode::kOverloaded) res.set_header("Retry-After", "1");
  send_json(res, status_for(err.code()), body);
}

Json task_json(const TaskSnapshot& t) {
  Json j{{"id", t.id},
         {"state", to_string(t.state)},
         {"layer", t.layer.str()},
         {"chunksWritten", t.chunks_written},
         {"chunksIndexed", t.chunks_indexed},
         {"bytesReceived", t.bytes_received},
         {"peakBufferedBytes", t.peak_buffered_bytes},
         {"maxChunkBytes", t.max_chunk_bytes},
         {"startedAt", format_timestamp(t.started_at)}};
  if (t.ended_at) j["endedAt"] = format_timestamp(*t.ended_at);
  if (t.error) {
    j["error"] = error_body(t.error_code ? to_string(*t.error_code) : "IMPORT_FAILED",
                            *t.error, t.error_offset)["error"];
  }
  Json history = Json::array();
  for (auto s : t.history) history.push_back(to_string(s));
  j["history"] = history;
  return j;
}

// Counts a request against a limit for its lifetime.
class Slot {
 public:
  Slot(std::atomic<std::size_t>& counter, std::size_t limit) : counter_(counter) {
    ok_ = counter_.fetch_add(1) < limit;
  }
  ~Slot() { counter_.fetch_sub(1); }
  explicit operator bool() const noexcept { return ok_; }

 private:
  std::atomic<std::size_t>& counter_;
  bool ok_;
};

LayerPath layer_of(const Request& req) {
  return LayerPath::parse(req.matches.size() > 1 ? req.matches[1].str() : std::string());
}

std::string param(const Request& req, const char* name) {
  return req.has_param(name) ? req.get_param_value(name) : std::string();
}

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes"; }

}  // namespace

struct HttpServer::Impl {
  Engine& engine;
  ServerConfig config;
  httplib::Server server;
  std::atomic<std::size_t> active{0};
  std::atomic<std::size_t> imports{0};
  int port = -1;
  std::thread thread;

  Impl(Engine& e, ServerConfig c) : engine(e), config(std::move(c)) {
    const auto threads = std::max<std::size_t>(config.threads, 1);
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server.set_read_timeout(120);
    server.set_write_timeout(120);
    server.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& err) {
        send_error(res, err);
      } catch (const std::exception& err) {
        send_json(res, 500, error_body("INTERNAL", err.what(), std::nullopt));
      } catch (...) {
        send_json(res, 500, error_body("INTERNAL", "unknown failure", std::nullopt));
      }
    });
    routes();
  }

  // Runs `body` under the request limit, mapping engine errors to JSON.
  template <typename F>
  void guarded(Response& res, F&& body) {
    Slot slot(active, config.max_concurrent_requests);
    if (!slot) {
      res.set_header("Connection", "close");
      send_error(res, Error(ErrorCode::kOverloaded, "too many concurrent requests"));
      return;
    }
    try {
      body();
    } catch (const Error& err) {
      send_error(res, err);
    }
  }

  void routes() {
    const std::string store = R"(/store(/.*)?)";

    server.Get("/", [this](const Request&, Response& res) {
      guarded(res, [&] {
        send_json(res, 200,
                  Json{{"name", "geostore"},
                       {"version", kVersion},
                       {"chunks", engine.store().size()},
                       {"indexed", engine.index().size()},
                       {"tasks", engine.task_count()},
                       {"activeRequests", active.load()}});
      });
    });

    server.Get(R"(/tasks/([^/]+))", [this](const Request& req, Response& res) {
      guarded(res, [&] {
        auto snap = engine.task(req.matches[1].str());
        if (!snap) throw Error(ErrorCode::kNotFound, "no such task: " + req.matches[1].str());
        send_json(res, 200, task_json(*snap));
      });
    });

    server.Post(store, [this](const Request& req, Response& res,
                              const httplib::ContentReader& reader) {
      guarded(res, [&] { import(req, res, reader); });
    });

    server.Get(store, [this](const Request& req, Response& res) {
      guarded(res, [&] { search(req, res); });
    });

    server.Put(store, [this](const Request& req, Response& res) {
      guarded(res, [&] {
        MetadataDelta delta;
        if (req.has_param("properties")) {
          delta.set_properties = parse_properties(param(req, "properties"));
        }
        if (req.has_param("tags")) delta.add_tags = parse_tags(param(req, "tags"));
        const auto n = engine.update_metadata(param(req, "search"), layer_of(req), delta);
        send_json(res, 200, Json{{"affected", n}});
      });
    });

    server.Delete(store, [this](const Request& req, Response& res) {
      guarded(res, [&] {
        const auto layer = layer_of(req);
        if (req.has_param("properties") || req.has_param("tags")) {
          MetadataDelta delta;
          if (req.has_param("properties")) {
            delta.remove_properties = parse_property_keys(param(req, "properties"));
          }
          if (req.has_param("tags")) delta.remove_tags = parse_tags(param(req, "tags"));
          const auto n = engine.update_metadata(param(req, "search"), layer, delta);
          send_json(res, 200, Json{{"affected", n}});
          return;
        }
        const auto n = engine.remove(param(req, "search"), layer, truthy(param(req, "all")));
        send_json(res, 200, Json{{"deleted", n}});
      });
    });
  }

  void import(const Request& req, Response& res, const httplib::ContentReader& reader) {
    Slot slot(imports, config.max_concurrent_imports);
    if (!slot) {
      res.set_header("Connection", "close");
      throw Error(ErrorCode::kOverloaded, "too many concurrent imports");
    }
    ImportOptions options;
    options.layer = layer_of(req);
    if (req.has_param("tags")) options.tags = parse_tags(param(req, "tags"));
    if (req.has_param("properties")) {
      options.properties = parse_properties(param(req, "properties"));
    }
    if (auto crs = param(req, "fallbackCRS"); !crs.empty()) options.fallback_crs = crs;

    auto session = engine.begin_import(std::move(options));
    const auto task_id = session->task_id();
    std::optional<Error> failure;
    const bool complete = reader([&](const char* data, std::size_t len) {
      try {
        session->feed(std::string_view(data, len));
        return true;
      } catch (const Error& err) {
        failure = err;
        return false;
      }
    });
    if (!failure) {
      try {
        if (!complete) throw Error(ErrorCode::kIoError, "request body was not received completely");
        session->finish();
      } catch (const Error& err) {
        failure = err;
      }
    }
    if (failure) {
      // The session has already rolled back; make sure of it when the body
      // was cut short before any splitter error.
      session->abort(failure->message());
      send_error(res, *failure, Json{{"task", task_id}});
      return;
    }
    res.set_header("Location", "/tasks/" + task_id);
    send_json(res, 202, Json{{"task", task_id}});
  }

  void search(const Request& req, Response& res) {
    auto result = std::make_shared<SearchResult>(
        engine.search(param(req, "search"), layer_of(req)));
    res.set_chunked_content_provider(
        std::string(result->content_type()),
        [result](std::size_t, httplib::DataSink& sink) {
          std::string buffer;
          buffer.reserve(kStreamBuffer);
          auto flush = [&] {
            const bool ok = buffer.empty() || sink.write(buffer.data(), buffer.size());
            buffer.clear();
            return ok;
          };
          try {
            const bool ok = result->write([&](std::string_view s) {
              buffer.append(s);
              return buffer.size() < kStreamBuffer || flush();
            });
            if (!ok || !flush()) return false;
          } catch (...) {
            // Dropping the connection without the final chunk tells the
            // client the document is incomplete.
            return false;
          }
          sink.done();
          return true;
        });
  }
};

HttpServer::HttpServer(Engine& engine, ServerConfig config)
    : impl_(std::make_unique<Impl>(engine, std::move(config))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->port >= 0) return impl_->port;
  const auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(c.host);
  } else if (impl_->server.bind_to_port(c.host, c.port)) {
    impl_->port = c.port;
  }
  if (impl_->port <= 0) {
    impl_->port = -1;
    throw Error(ErrorCode::kIoError,
                "cannot listen on " + c.host + ":" + std::to_string(c.port));
  }
  return impl_->port;
}

void HttpServer::run() {
  bind();
  impl_->server.listen_after_bind();
}

void HttpServer::start() {
  bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int HttpServer::port() const noexcept { return impl_->port; }

}  // namespace geostore
