// Copyright 2026 The FreqNorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FREQNORM_PARALLEL_H_
#define FREQNORM_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace freqnorm {

/// Worker count from FREQNORM_THREADS (default 1, clamped to [1, 64]).
std::size_t thread_count();

/// Overrides the worker count for the current process. 0 restores the
/// environment-derived value.
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Each index is visited exactly once and
/// bodies must write disjoint outputs; there is no cross-index reduction, so
/// results are identical for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace freqnorm

#endif  // FREQNORM_PARALLEL_H_
