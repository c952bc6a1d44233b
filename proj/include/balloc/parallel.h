// Copyright 2026 The balloc Authors
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

#ifndef BALLOC_PARALLEL_H_
#define BALLOC_PARALLEL_H_

#include <functional>

namespace balloc {

// Worker count: BALLOC_THREADS if set and positive, else hardware concurrency.
int WorkerCount();

// Runs fn(0..n-1), distributing indices over WorkerCount() threads.
// Each index runs exactly once; results must be written to disjoint slots.
void ParallelFor(int n, const std::function<void(int)>& fn);

}  // namespace balloc

#endif  // BALLOC_PARALLEL_H_
