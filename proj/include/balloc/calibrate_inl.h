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

#ifndef BALLOC_CALIBRATE_INL_H_
#define BALLOC_CALIBRATE_INL_H_

#include <cmath>

#include "balloc/errors.h"

namespace balloc {

template <typename Pred>
absl::StatusOr<double> BisectSigma(Pred&& ok, double tol) {
  if (!(tol > 0)) return absl::InvalidArgumentError("tolerance must be positive");
  auto eval = [&](double s) -> absl::StatusOr<bool> { return ok(s); };
  double lo, hi;
  absl::StatusOr<bool> start = eval(kSigmaStart);
  if (!start.ok()) return start.status();
  if (*start) {
    hi = kSigmaStart;
    lo = hi / 2;
    while (true) {
      absl::StatusOr<bool> r = eval(lo);
      if (!r.ok()) return r.status();
      if (!*r) break;
      hi = lo;
      if (lo < 1.0 / kSigmaMax) return hi;
      lo /= 2;
    }
  } else {
    lo = kSigmaStart;
    hi = 2 * lo;
    while (true) {
      absl::StatusOr<bool> r = eval(hi);
      if (!r.ok()) return r.status();
      if (*r) break;
      lo = hi;
      hi *= 2;
      if (hi > kSigmaMax) {
        return UnachievableError("no sigma up to 2^16 meets the privacy target");
      }
    }
  }
  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo * hi);
    absl::StatusOr<bool> r = eval(mid);
    if (!r.ok()) return r.status();
    if (*r) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace balloc

#endif  // BALLOC_CALIBRATE_INL_H_
