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

#ifndef BALLOC_STRATEGY_MATRIX_H_
#define BALLOC_STRATEGY_MATRIX_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace balloc {

// Lower-triangular N x N strategy matrix, stored either densely (row-major)
// or as Toeplitz coefficients c with C[i][j] = c[i - j].
class StrategyMatrix {
 public:
  enum class Kind { kDense, kToeplitz };

  // Rejects non-finite entries and entries above the diagonal with magnitude
  // over 1e-12. Smaller ones are stored as exact zeros.
  static absl::StatusOr<StrategyMatrix> Dense(int n, std::vector<double> row_major);
  static absl::StatusOr<StrategyMatrix> Toeplitz(int n, std::vector<double> coeffs);

  int size() const { return n_; }
  Kind kind() const { return kind_; }
  double operator()(int row, int col) const;

  // Toeplitz only.
  std::span<const double> coefficients() const { return values_; }
  // Dense only.
  std::span<const double> dense_values() const { return values_; }

  // Largest i - j + 1 over nonzero entries; 1 for the zero matrix.
  int NaturalBandwidth() const;
  bool IsZero() const;
  std::vector<double> ToDense() const;

 private:
  StrategyMatrix(int n, Kind kind, std::vector<double> values)
      : n_(n), kind_(kind), values_(std::move(values)) {}

  int n_;
  Kind kind_;
  std::vector<double> values_;
};

absl::StatusOr<StrategyMatrix> BuildIdentity(int n);

// c with conv(c, c) equal to all-ones on the first `length` entries.
absl::StatusOr<std::vector<double>> SqrtToeplitzCoefficients(int length);

// d with conv(c, d) equal to the unit impulse, c the square-root coefficients.
absl::StatusOr<std::vector<double>> InvSqrtToeplitzCoefficients(int length);

// Inverse of the N x N banded lower-triangular Toeplitz matrix built from d.
// The result is Toeplitz, so it is returned in coefficient form with N
// coefficients.
absl::StatusOr<StrategyMatrix> InvertBandedToeplitz(std::span<const double> d, int n);

}  // namespace balloc

#endif  // BALLOC_STRATEGY_MATRIX_H_
