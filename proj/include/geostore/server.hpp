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


#ifndef GEOSTORE_SERVER_HPP_
#define GEOSTORE_SERVER_HPP_

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "geostore/engine.hpp"

namespace geostore {

inline constexpr int kDefaultPort = 63020;

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 picks a free port
  EngineConfig engine;
  std::size_t threads = 16;
  // Requests beyond these limits get 503.
  std::size_t max_concurrent_requests = 64;
  std::size_t max_concurrent_imports = 8;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Applies a JSON config document on top of `base`. Unknown keys are
/// rejected with Error(kInvalidArgument).
ServerConfig parse_server_config(std::string_view json, ServerConfig base = {});

/// Applies GEOSTORE_* environment variables on top of `base`.
ServerConfig apply_environment(ServerConfig base, const EnvLookup& env = std::getenv);

/// Defaults, then the optional file, then the environment.
ServerConfig load_server_config(const std::optional<std::filesystem::path>& file,
                                const EnvLookup& env = std::getenv);

/// HTTP front end. The engine must outlive the server.
class HttpServer {
 public:
  HttpServer(Engine& engine, ServerConfig config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the listening socket and returns the port. Throws
  /// Error(kIoError) when the address is unavailable.
  int bind();
  /// Serves until stop(); binds first if needed.
  void run();
  /// bind() plus run() on a background thread.
  void start();
  void stop();
  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geostore

#endif  // GEOSTORE_SERVER_HPP_
