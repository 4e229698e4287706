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

#ifndef GEOSTORE_SRC_FSUTIL_HPP_
#define GEOSTORE_SRC_FSUTIL_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace geostore::fsutil {

namespace fs = std::filesystem;

/// Writes `data` to a temporary sibling and renames it over `path`, so
/// readers see either the old or the new file. Throws Error(kIoError).
void write_atomic(const fs::path& path, std::string_view data, bool sync);

/// Whole file, or nullopt if it does not exist. Throws Error(kIoError) on
/// other failures.
std::optional<std::string> read_file(const fs::path& path);

void sync_directory(const fs::path& dir);

/// Removes a file if present; returns whether it existed.
bool remove_file(const fs::path& path);

}  // namespace geostore::fsutil

#endif  // GEOSTORE_SRC_FSUTIL_HPP_
