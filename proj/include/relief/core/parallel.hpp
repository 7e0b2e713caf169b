/*
 * Copyright 2026 The Reliefmap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RELIEF_CORE_PARALLEL_HPP
#define RELIEF_CORE_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

#include "relief/core/types.hpp"

namespace relief {

/// Chunked index-range parallel loop. In deterministic mode the body runs
/// sequentially in index order; callers that need bit-reproducible output
/// must use that mode. The parallel body must only perform cell-commutative
/// or per-index-disjoint writes.
template <typename Fn>
void parallelFor(std::size_t n, ExecMode mode, Fn&& fn) {
  if (n == 0) return;
  unsigned workers = std::thread::hardware_concurrency();
  if (mode == ExecMode::kDeterministic || workers <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > 16) workers = 16;
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace relief

#endif  // RELIEF_CORE_PARALLEL_HPP
