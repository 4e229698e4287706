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


#include "client.hpp"

#include <zlib.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <httplib.h>
#include <vector>

namespace geostore::cli {
namespace {

constexpr std::size_t kPiece = 64 * 1024;

[[noreturn]] void connection_failed(const std::string& what, httplib::Error err) {
  throw ConnectionError(what + ": " + httplib::to_string(err));
}

// Streaming gzip encoder over a file.
class GzipFile {
 public:
  explicit GzipFile(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("no such file: " + path.string());
    if (deflateInit2(&z_, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
      throw std::runtime_error("zlib initialisation failed");
    }
  }
  ~GzipFile() { deflateEnd(&z_); }

  /// Next compressed block; empty once everything is out.
  std::string next() {
    std::string out;
    while (out.empty() && !done_) {
      std::vector<char> raw(kPiece);
      in_.read(raw.data(), static_cast<std::streamsize>(raw.size()));
      const auto got = static_cast<std::size_t>(in_.gcount());
      if (in_.bad()) throw std::runtime_error("read error");
      const int flush = got < raw.size() ? Z_FINISH : Z_NO_FLUSH;
      z_.next_in = reinterpret_cast<Bytef*>(raw.data());
      z_.avail_in = static_cast<uInt>(got);
      int rc;
      do {
        char buf[kPiece];
        z_.next_out = reinterpret_cast<Bytef*>(buf);
        z_.avail_out = sizeof buf;
        rc = deflate(&z_, flush);
        if (rc == Z_STREAM_ERROR) throw std::runtime_error("gzip failed");
        out.append(buf, sizeof buf - z_.avail_out);
      } while (z_.avail_out == 0 || (flush == Z_FINISH && rc != Z_STREAM_END));
      if (flush == Z_FINISH) done_ = true;
    }
    return out;
  }

 private:
  std::ifstream in_;
  z_stream z_{};
  bool done_ = false;
};

}  // namespace

std::string Endpoint::base() const {
  return "http://" + host + ":" + std::to_string(port) + prefix;
}

Endpoint parse_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw std::invalid_argument("server URL must start with http://: " + std::string(url));
  }
  url.remove_prefix(kScheme.size());
  Endpoint e;
  const auto slash = url.find('/');
  auto authority = url.substr(0, slash);
  if (slash != std::string_view::npos) {
    e.prefix = std::string(url.substr(slash));
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']', colon) == std::string_view::npos) {
    const auto p = authority.substr(colon + 1);
    int port = 0;
    auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
    if (ec != std::errc() || end != p.data() + p.size() || port <= 0 || port > 65535) {
      throw std::invalid_argument("bad port in server URL: " + std::string(p));
    }
    e.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw std::invalid_argument("server URL has no host");
  e.host = std::string(authority);
  return e;
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

struct Client::Impl {
  httplib::Client http;
  Impl(const Endpoint& e) : http(e.host, e.port) {
    http.set_url_encode(false);
    http.set_connection_timeout(10);
    http.set_read_timeout(600);
    http.set_write_timeout(600);
  }
};

Client::Client(Endpoint endpoint, std::ostream* dry_run_transcript)
    : endpoint_(std::move(endpoint)), transcript_(dry_run_transcript) {
  if (!transcript_) impl_ = std::make_unique<Impl>(endpoint_);
}

Client::~Client() = default;

void Client::note(const std::string& line) {
  if (!transcript_) return;
  std::lock_guard lock(transcript_mu_);
  *transcript_ << line << "\n";
}

Reply Client::post_file(const std::string& target, const std::filesystem::path& file,
                        const std::string& content_type) {
  if (dry_run()) {
    note("POST " + endpoint_.base() + target);
    note("  Content-Type: " + content_type);
    note("  Content-Encoding: gzip");
    note("  Body: " + file.filename().string());
    return {};
  }
  GzipFile gz(file);
  httplib::Headers headers = {{"Content-Encoding", "gzip"}};
  std::string failure;
  auto res = impl_->http.Post(
      endpoint_.prefix + target, headers,
      [&](std::size_t, httplib::DataSink& sink) {
        try {
          auto block = gz.next();
          if (block.empty()) {
            sink.done();
            return true;
          }
          return sink.write(block.data(), block.size());
        } catch (const std::exception& e) {
          failure = e.what();
          return false;
        }
      },
      content_type);
  if (!failure.empty()) throw std::runtime_error(failure);
  if (!res) connection_failed("upload of " + file.string() + " failed", res.error());
  return {res->status, res->body};
}

Reply Client::get(const std::string& target) {
  if (dry_run()) {
    note("GET " + endpoint_.base() + target);
    return {};
  }
  auto res = impl_->http.Get(endpoint_.prefix + target);
  if (!res) connection_failed("GET " + target, res.error());
  return {res->status, res->body};
}

Reply Client::get_stream(const std::string& target, const Chunk& on_chunk) {
  if (dry_run()) {
    note("GET " + endpoint_.base() + target);
    return {};
  }
  Reply reply;
  bool sink_failed = false;
  auto res = impl_->http.Get(
      endpoint_.prefix + target,
      [&](const httplib::Response& r) {
        reply.status = r.status;
        return true;
      },
      [&](const char* data, std::size_t len) {
        if (reply.status != 200) {
          reply.body.append(data, len);
          return true;
        }
        if (!on_chunk(std::string_view(data, len))) {
          sink_failed = true;
          return false;
        }
        return true;
      });
  if (sink_failed) throw std::runtime_error("cannot write output");
  if (!res) connection_failed("GET " + target, res.error());
  return reply;
}

Reply Client::put(const std::string& target) {
  if (dry_run()) {
    note("PUT " + endpoint_.base() + target);
    return {};
  }
  auto res = impl_->http.Put(endpoint_.prefix + target, "", "text/plain");
  if (!res) connection_failed("PUT " + target, res.error());
  return {res->status, res->body};
}

Reply Client::del(const std::string& target) {
  if (dry_run()) {
    note("DELETE " + endpoint_.base() + target);
    return {};
  }
  auto res = impl_->http.Delete(endpoint_.prefix + target);
  if (!res) connection_failed("DELETE " + target, res.error());
  return {res->status, res->body};
}

}  // namespace geostore::cli
