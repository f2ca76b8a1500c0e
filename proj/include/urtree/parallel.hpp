/*
 * Copyright 2026 The urtree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef URTREE_PARALLEL_HPP_
#define URTREE_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace urtree {

// Thread count from URTREE_THREADS, else the hardware concurrency (>= 1).
int DefaultThreads();

// Runs body(0) ... body(count - 1) on up to `threads` workers. Each index is
// processed exactly once; callers write results into per-index slots, so the
// outcome does not depend on scheduling. If bodies throw, the exception of
// the lowest failing index is rethrown after all workers finish.
void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body);

}  // namespace urtree

#endif  // URTREE_PARALLEL_HPP_
