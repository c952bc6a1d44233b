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

#include "balloc/mixture.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace balloc {

bool MixtureMeans::IsZero() const {
  for (double v : means_.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

absl::StatusOr<MixtureMeans> ComputeMixtureMeans(const StrategyMatrix& c,
                                                 const Schedule& schedule) {
  const int n = c.size();
  if (n != schedule.iterations()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "matrix size %d does not match schedule N = k*b = %d", n,
        schedule.iterations()));
  }
  const int b = schedule.batches();
  DenseMatrix means(b, n, 0.0);
  if (c.kind() == StrategyMatrix::Kind::kToeplitz) {
    std::span<const double> coef = c.coefficients();
    const int len = static_cast<int>(coef.size());
    for (int col = 0; col < n; ++col) {
      double* m = means.row(col % b);
      const int end = std::min(n, col + len);
      for (int row = col; row < end; ++row) m[row] += std::abs(coef[row - col]);
    }
  } else {
    std::span<const double> v = c.dense_values();
    for (int row = 0; row < n; ++row) {
      const double* r = v.data() + static_cast<size_t>(row) * n;
      for (int col = 0; col <= row; ++col) {
        if (r[col] != 0.0) means(col % b, row) += std::abs(r[col]);
      }
    }
  }
  return MixtureMeans(schedule, std::move(means));
}

absl::StatusOr<MixtureMeans> MixtureMeansFromRows(const Schedule& schedule,
                                                  const DenseMatrix& rows) {
  if (rows.rows() != schedule.batches()) {
    return absl::InvalidArgumentError("need one mean vector per batch");
  }
  for (double v : rows.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("mixture means must be finite and non-negative");
    }
  }
  return MixtureMeans(schedule, rows);
}

DenseMatrix Gram(const MixtureMeans& means) {
  const int b = means.batches();
  const int n = means.dimension();
  DenseMatrix g(b, b, 0.0);
  for (int i = 0; i < b; ++i) {
    const double* mi = means.matrix().row(i);
    for (int j = i; j < b; ++j) {
      const double* mj = means.matrix().row(j);
      double s = 0.0;
      for (int t = 0; t < n; ++t) s += mi[t] * mj[t];
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

int CyclicDistance(int i, int j, int b) {
  const int d = std::abs(i - j);
  return std::min(d, b - d);
}

absl::StatusOr<GramSummary> CyclicTruncate(const DenseMatrix& gram, int p) {
  const int b = gram.rows();
  if (gram.cols() != b || b < 1) {
    return absl::InvalidArgumentError("Gram matrix must be square and non-empty");
  }
  if (p < 1 || p > b) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bandwidth p=%d outside [1, %d]", p, b));
  }
  GramSummary s;
  s.gram = gram;
  s.bandwidth = p;
  s.tau = 0.0;
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) {
      if (CyclicDistance(i, j, b) >= p) s.tau = std::max(s.tau, gram(i, j));
    }
  }
  s.banded = DenseMatrix(b, b, 0.0);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) {
      if (CyclicDistance(i, j, b) < p) s.banded(i, j) = std::max(gram(i, j) - s.tau, 0.0);
    }
  }
  return s;
}

}  // namespace balloc
