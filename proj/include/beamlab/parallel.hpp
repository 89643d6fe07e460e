// Copyright 2026 The Beamlab Authors
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

#ifndef BEAMLAB_PARALLEL_HPP_
#define BEAMLAB_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace beamlab {

// Worker count for parallel_for: BEAMLAB_THREADS if set (clamped to >= 1),
// otherwise hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, count). Each index is visited exactly once; results
// must go to disjoint slots so the outcome is independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace beamlab

#endif  // BEAMLAB_PARALLEL_HPP_
