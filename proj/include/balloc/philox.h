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

#ifndef BALLOC_PHILOX_H_
#define BALLOC_PHILOX_H_

#include <array>
#include <cstdint>

namespace balloc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<uint32_t, 4>;
  using Key = std::array<uint32_t, 2>;

  static Counter Block(Counter ctr, Key key);
};

// Stream of doubles for one (seed, stream id) pair.
class PhiloxStream {
 public:
  PhiloxStream(uint64_t seed, uint64_t stream);

  // Uniform in (0, 1), 53-bit resolution.
  double Uniform();
  double Normal();

 private:
  uint32_t Next32();

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace balloc

#endif  // BALLOC_PHILOX_H_
