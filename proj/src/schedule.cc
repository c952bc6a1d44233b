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

#include "balloc/schedule.h"

#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace balloc {

absl::StatusOr<Schedule> Schedule::Create(int epochs, int batches_per_epoch) {
  if (epochs < 1 || batches_per_epoch < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "epochs and batches must be positive, got k=%d b=%d", epochs,
        batches_per_epoch));
  }
  if (static_cast<long long>(epochs) * batches_per_epoch >
      std::numeric_limits<int>::max()) {
    return absl::InvalidArgumentError("schedule too long");
  }
  return Schedule(epochs, batches_per_epoch);
}

}  // namespace balloc
