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

#ifndef GEOSTORE_INDEX_WORKER_HPP_
#define GEOSTORE_INDEX_WORKER_HPP_

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

#include "geostore/index.hpp"

namespace geostore {

/// Serializes all index writes through one background thread.
class IndexWorker {
 public:
  using Job = std::function<void(Index&)>;

  /// `max_pending` bounds the queue; submit() beyond it throws
  /// Error(kOverloaded).
  explicit IndexWorker(Index& index, std::size_t max_pending = 1 << 16);
  /// Runs the remaining jobs, then stops.
  ~IndexWorker();

  IndexWorker(const IndexWorker&) = delete;
  IndexWorker& operator=(const IndexWorker&) = delete;

  std::future<void> submit(Job job);

  /// Runs `job` on the worker and waits for it, rethrowing its exception.
  template <typename R>
  R call(std::function<R(Index&)> job) {
    std::promise<R> done;
    auto result = done.get_future();
    submit([&done, &job](Index& index) {
      try {
        if constexpr (std::is_void_v<R>) {
          job(index);
          done.set_value();
        } else {
          done.set_value(job(index));
        }
      } catch (...) {
        done.set_exception(std::current_exception());
      }
    }).get();
    return result.get();
  }

  /// Hook run before every job; tests use it to slow indexing down.
  void set_throttle(std::function<void()> throttle);

  /// Blocks until every job submitted so far has run.
  void drain();
  std::size_t pending() const;

 private:
  void run();

  Index& index_;
  std::size_t max_pending_;
  mutable std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::deque<std::packaged_task<void()>> queue_;
  std::function<void()> throttle_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace geostore

#endif  // GEOSTORE_INDEX_WORKER_HPP_
