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

#include "geostore/index_worker.hpp"

#include "geostore/error.hpp"

namespace geostore {

IndexWorker::IndexWorker(Index& index, std::size_t max_pending)
    : index_(index), max_pending_(max_pending), thread_([this] { run(); }) {}

IndexWorker::~IndexWorker() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  wake_.notify_all();
  thread_.join();
}

std::future<void> IndexWorker::submit(Job job) {
  std::packaged_task<void()> task(
      [this, job = std::move(job)] { job(index_); });
  auto future = task.get_future();
  {
    std::lock_guard lock(mu_);
    if (queue_.size() >= max_pending_) {
      throw Error(ErrorCode::kOverloaded, "index queue is full");
    }
    queue_.push_back(std::move(task));
  }
  wake_.notify_one();
  return future;
}

void IndexWorker::set_throttle(std::function<void()> throttle) {
  std::lock_guard lock(mu_);
  throttle_ = std::move(throttle);
}

void IndexWorker::drain() {
  std::unique_lock lock(mu_);
  idle_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

std::size_t IndexWorker::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size() + (busy_ ? 1 : 0);
}

void IndexWorker::run() {
  std::unique_lock lock(mu_);
  while (true) {
    wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) return;
    auto task = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    auto throttle = throttle_;
    lock.unlock();
    if (throttle) throttle();
    task();
    lock.lock();
    busy_ = false;
    if (queue_.empty()) idle_.notify_all();
  }
}

}  // namespace geostore
