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

#include "balloc/strategy_matrix.h"

#include <cmath>
#include <cstddef>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "balloc/errors.h"

namespace balloc {
namespace {

constexpr double kUpperTolerance = 1e-12;

absl::Status CheckFinite(std::span<const double> v) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("non-finite matrix entry at position %d", i));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<StrategyMatrix> StrategyMatrix::Dense(int n,
                                                     std::vector<double> row_major) {
  if (n < 1) return absl::InvalidArgumentError("matrix size must be positive");
  if (row_major.size() != static_cast<size_t>(n) * n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dense matrix needs %d entries, got %d", static_cast<size_t>(n) * n,
        row_major.size()));
  }
  if (auto s = CheckFinite(row_major); !s.ok()) return s;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double& v = row_major[static_cast<size_t>(i) * n + j];
      if (std::abs(v) > kUpperTolerance) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "entry (%d,%d)=%g above the diagonal; matrix must be lower-triangular",
            i, j, v));
      }
      v = 0.0;
    }
  }
  return StrategyMatrix(n, Kind::kDense, std::move(row_major));
}

absl::StatusOr<StrategyMatrix> StrategyMatrix::Toeplitz(int n,
                                                        std::vector<double> coeffs) {
  if (n < 1) return absl::InvalidArgumentError("matrix size must be positive");
  if (coeffs.empty() || coeffs.size() > static_cast<size_t>(n)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "toeplitz coefficient count must be in [1, %d], got %d", n, coeffs.size()));
  }
  if (auto s = CheckFinite(coeffs); !s.ok()) return s;
  return StrategyMatrix(n, Kind::kToeplitz, std::move(coeffs));
}

double StrategyMatrix::operator()(int row, int col) const {
  if (col > row) return 0.0;
  if (kind_ == Kind::kDense) return values_[static_cast<size_t>(row) * n_ + col];
  const size_t lag = row - col;
  return lag < values_.size() ? values_[lag] : 0.0;
}

int StrategyMatrix::NaturalBandwidth() const {
  int band = 1;
  if (kind_ == Kind::kToeplitz) {
    for (size_t t = 0; t < values_.size(); ++t) {
      if (values_[t] != 0.0) band = static_cast<int>(t) + 1;
    }
    return band;
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (values_[static_cast<size_t>(i) * n_ + j] != 0.0) {
        band = std::max(band, i - j + 1);
        break;
      }
    }
  }
  return band;
}

bool StrategyMatrix::IsZero() const {
  for (double v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

std::vector<double> StrategyMatrix::ToDense() const {
  if (kind_ == Kind::kDense) return values_;
  std::vector<double> out(static_cast<size_t>(n_) * n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) out[static_cast<size_t>(i) * n_ + j] = (*this)(i, j);
  }
  return out;
}

absl::StatusOr<StrategyMatrix> BuildIdentity(int n) {
  if (n < 1) return absl::InvalidArgumentError("N must be positive");
  return StrategyMatrix::Toeplitz(n, {1.0});
}

absl::StatusOr<std::vector<double>> SqrtToeplitzCoefficients(int length) {
  if (length < 1) return absl::InvalidArgumentError("length must be positive");
  std::vector<double> c(length);
  c[0] = 1.0;
  for (int t = 1; t < length; ++t) {
    double s = 0.0;
    for (int u = 1; u < t; ++u) s += c[u] * c[t - u];
    c[t] = (1.0 - s) / (2.0 * c[0]);
  }
  return c;
}

absl::StatusOr<std::vector<double>> InvSqrtToeplitzCoefficients(int length) {
  auto c = SqrtToeplitzCoefficients(length);
  if (!c.ok()) return c.status();
  std::vector<double> d(length);
  d[0] = 1.0 / (*c)[0];
  for (int t = 1; t < length; ++t) {
    double s = 0.0;
    for (int u = 1; u <= t; ++u) s += (*c)[u] * d[t - u];
    d[t] = -s / (*c)[0];
  }
  return d;
}

absl::StatusOr<StrategyMatrix> InvertBandedToeplitz(std::span<const double> d, int n) {
  if (n < 1) return absl::InvalidArgumentError("N must be positive");
  if (d.empty() || d[0] == 0.0) {
    return SingularError("singular: leading coefficient is zero");
  }
  // First column x of C solves D x = e_0 by forward substitution.
  std::vector<double> x(n, 0.0);
  const int band = static_cast<int>(d.size());
  for (int i = 0; i < n; ++i) {
    double rhs = i == 0 ? 1.0 : 0.0;
    for (int u = 1; u < band && u <= i; ++u) rhs -= d[u] * x[i - u];
    x[i] = rhs / d[0];
  }
  return StrategyMatrix::Toeplitz(n, std::move(x));
}

}  // namespace balloc
