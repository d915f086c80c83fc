// Copyright 2026 The SHEFL Simulator Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace shefl {

/// Fixed-size worker pool executing an indexed batch of tasks with barrier
/// semantics. Tasks must write only to their own output slots; the caller
/// reduces results in a fixed order after run() returns, which keeps
/// parallel execution bit-identical to sequential execution.
class ThreadPool {
 public:
  explicit ThreadPool(int workers);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int workers() const { return static_cast<int>(threads_.size()) + 1; }

  /// Runs fn(0), ..., fn(count-1) across the workers and the calling thread;
  /// returns when all are done. The first task exception is rethrown.
  void run(std::size_t count, const std::function<void(std::size_t)>& fn);

  /// Worker count from the SHEFL_THREADS environment variable
  /// (0 or unset means hardware concurrency).
  static int env_workers();

 private:
  void worker_loop();
  void work_until_batch_done();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* batch_fn_ = nullptr;
  std::size_t batch_count_ = 0;
  std::size_t next_index_ = 0;
  std::size_t in_flight_ = 0;
  std::uint64_t generation_ = 0;
  std::exception_ptr first_error_;
  bool stop_ = false;
};

}  // namespace shefl
