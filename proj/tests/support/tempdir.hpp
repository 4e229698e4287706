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


#ifndef GEOSTORE_TESTS_SUPPORT_TEMPDIR_HPP_
#define GEOSTORE_TESTS_SUPPORT_TEMPDIR_HPP_

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

namespace geostore::testing {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& prefix = "geostore") {
    path = std::filesystem::temp_directory_path() /
           (prefix + "-" + std::to_string(std::random_device{}()) + "-" +
            std::to_string(::getpid()));
    std::filesystem::remove_all(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace geostore::testing

#endif  // GEOSTORE_TESTS_SUPPORT_TEMPDIR_HPP_
