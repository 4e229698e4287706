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


#ifndef GEOSTORE_TOOLS_CLI_CLIENT_HPP_
#define GEOSTORE_TOOLS_CLI_CLIENT_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geostore::cli {

struct Endpoint {
  std::string host = "localhost";
  int port = 63020;
  std::string prefix;  // path prefix without trailing slash

  std::string base() const;
};

/// Accepts `http://host[:port][/prefix]`. Throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view url);

/// Percent-encodes everything except unreserved characters.
std::string url_encode(std::string_view text);

struct Reply {
  int status = 0;  // 0 in dry-run mode
  std::string body;
};

class ConnectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One HTTP client per command. In dry-run mode every request is printed
/// to `transcript` and nothing is sent.
class Client {
 public:
  using Chunk = std::function<bool(std::string_view)>;

  Client(Endpoint endpoint, std::ostream* dry_run_transcript);
  ~Client();

  bool dry_run() const noexcept { return transcript_ != nullptr; }
  std::string base() const { return endpoint_.base(); }
  /// Prints a line to the transcript in dry-run mode.
  void note(const std::string& line);

  /// Streams `file` gzip-compressed.
  Reply post_file(const std::string& target, const std::filesystem::path& file,
                  const std::string& content_type);
  Reply get(const std::string& target);
  /// Body goes to `on_chunk` when the status is 200 and to Reply::body
  /// otherwise.
  Reply get_stream(const std::string& target, const Chunk& on_chunk);
  Reply put(const std::string& target);
  Reply del(const std::string& target);

 private:
  struct Impl;
  Endpoint endpoint_;
  std::ostream* transcript_;
  std::mutex transcript_mu_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geostore::cli

#endif  // GEOSTORE_TOOLS_CLI_CLIENT_HPP_
