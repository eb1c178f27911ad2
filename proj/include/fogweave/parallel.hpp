// Copyright 2026 The fogweave Authors
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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fogweave {

/// Worker count: `requested`, or the hardware concurrency when 0, capped
/// by the FOGWEAVE_THREADS environment variable when it is set.
inline unsigned worker_count(unsigned requested = 0) {
  unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FOGWEAVE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1U, n);
}

/// Runs fn(k) for k in [begin, end) on up to `workers` threads. Work items
/// must write to disjoint outputs; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, Fn&& fn) {
  if (end <= begin) return;
  if (workers <= 1 || end - begin == 1) {
    for (std::size_t k = begin; k < end; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(workers, end - begin);
    for (std::size_t w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < end; k = next++) {
          try {
            fn(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = end;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fogweave
