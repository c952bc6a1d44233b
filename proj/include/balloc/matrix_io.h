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

#ifndef BALLOC_MATRIX_IO_H_
#define BALLOC_MATRIX_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "absl/status/statusor.h"
#include "balloc/strategy_matrix.h"

namespace balloc {

// Text format:
//   # balloc-matrix v1 kind=<dense|toeplitz> n=<N>
// followed by N comma-separated rows (dense) or one coefficient line.
absl::StatusOr<StrategyMatrix> ReadMatrix(std::istream& in);
absl::Status WriteMatrix(const StrategyMatrix& c, std::ostream& out);

absl::StatusOr<StrategyMatrix> LoadMatrix(const std::string& path);
absl::Status SaveMatrix(const StrategyMatrix& c, const std::string& path);

}  // namespace balloc

#endif  // BALLOC_MATRIX_IO_H_
