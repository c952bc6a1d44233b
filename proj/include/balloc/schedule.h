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

#ifndef BALLOC_SCHEDULE_H_
#define BALLOC_SCHEDULE_H_

#include "absl/status/statusor.h"

namespace balloc {

// Balls-in-bins participation: k epochs of b batches, N = k * b steps.
class Schedule {
 public:
  static absl::StatusOr<Schedule> Create(int epochs, int batches_per_epoch);

  int epochs() const { return epochs_; }
  int batches() const { return batches_; }
  int iterations() const { return epochs_ * batches_; }
  // 1-based epoch of a 1-based step.
  int EpochOf(int step) const { return (step - 1) / batches_ + 1; }

 private:
  Schedule(int epochs, int batches) : epochs_(epochs), batches_(batches) {}
  int epochs_;
  int batches_;
};

}  // namespace balloc

#endif  // BALLOC_SCHEDULE_H_
