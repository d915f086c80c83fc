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

#include "shefl/thread_pool.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace shefl {

ThreadPool::ThreadPool(int workers) {
  if (workers < 1) throw std::invalid_argument("ThreadPool: workers must be >= 1");
  // The calling thread participates in run(), so spawn workers-1 threads.
  for (int i = 0; i < workers - 1; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void ThreadPool::run(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  {
    std::lock_guard lock(mutex_);
    batch_fn_ = &fn;
    batch_count_ = count;
    next_index_ = 0;
    in_flight_ = 0;
    first_error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  work_until_batch_done();

  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return next_index_ >= batch_count_ && in_flight_ == 0; });
  batch_fn_ = nullptr;
  if (first_error_) std::rethrow_exception(first_error_);
}

void ThreadPool::work_until_batch_done() {
  for (;;) {
    std::size_t index;
    {
      std::lock_guard lock(mutex_);
      if (next_index_ >= batch_count_) return;
      index = next_index_++;
      ++in_flight_;
    }
    try {
      (*batch_fn_)(index);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!first_error_) first_error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      --in_flight_;
    }
    done_.notify_all();
  }
}

void ThreadPool::worker_loop() {
  std::uint64_t seen_generation = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen_generation; });
      if (stop_) return;
      seen_generation = generation_;
    }
    work_until_batch_done();
  }
}

int ThreadPool::env_workers() {
  const char* env = std::getenv("SHEFL_THREADS");
  int n = 0;
  if (env && *env) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw std::runtime_error("SHEFL_THREADS is not an integer: " + std::string(env));
    }
    if (n < 0) throw std::runtime_error("SHEFL_THREADS must be >= 0");
  }
  if (n == 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
  }
  return n;
}

}  // namespace shefl
