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

#ifndef BALLOC_RENYI_H_
#define BALLOC_RENYI_H_

#include <vector>

#include "absl/status/statusor.h"
#include "balloc/dense_matrix.h"
#include "balloc/mixture.h"
#include "balloc/schedule.h"
#include "balloc/strategy_matrix.h"

namespace balloc {

struct RenyiOptions {
  // Empty means {2, ..., 64}.
  std::vector<int> alphas;
  // Cyclic bandwidth; 0 means min(natural bandwidth of C, 8).
  int bandwidth = 0;
  // Per-alpha cap on DP transitions. The bandwidth is lowered for an alpha
  // whose cost would exceed it; the tau correction keeps the result an upper
  // bound.
  double dp_budget = 4e6;
};

std::vector<int> DefaultAlphas();

// Largest b^alpha accepted by the enumeration oracle.
inline constexpr double kBruteForceLimit = 1e7;

// Enumerates all b^alpha index tuples of the remove-direction sum.
absl::StatusOr<double> RenyiRemoveBruteForce(const DenseMatrix& gram, double sigma,
                                             int alpha);

// Banded dynamic program over the truncated Gram matrix. Exact when
// summary.tau == 0, an upper bound otherwise.
absl::StatusOr<double> RenyiRemoveDp(const GramSummary& summary, double sigma,
                                     int alpha);

// Approximate number of DP transitions for a given truncation.
double EstimateDpCost(const GramSummary& summary, int alpha);

double RenyiAddBound(const DenseMatrix& gram, double sigma, int alpha);

// (eps, delta) conversion of an order-alpha Renyi bound, clamped to [0, 1].
double RenyiToDelta(double rho, int alpha, double epsilon);

struct RenyiEntry {
  int alpha = 2;
  double rho_remove = 0.0;
  double rho_add = 0.0;
  int bandwidth = 1;
  bool exact = false;
};

struct RenyiCurve {
  double sigma = 1.0;
  std::vector<RenyiEntry> entries;
};

struct RenyiDelta {
  double delta = 1.0;
  double delta_remove = 1.0;
  double delta_add = 1.0;
  int alpha = 2;
};

// Renyi curve of the dominating pair for every alpha in options.
absl::StatusOr<RenyiCurve> ComputeRenyiCurve(const DenseMatrix& gram, double sigma,
                                             int bandwidth, const RenyiOptions& options);

RenyiDelta DeltaFromCurve(const RenyiCurve& curve, double epsilon);

// Resolves the default bandwidth for a matrix and schedule.
int DefaultBandwidth(const StrategyMatrix& c, const Schedule& schedule,
                     const RenyiOptions& options);

absl::StatusOr<RenyiDelta> RenyiAccount(const StrategyMatrix& c, const Schedule& schedule,
                                        double sigma, double epsilon,
                                        const RenyiOptions& options);

}  // namespace balloc

#endif  // BALLOC_RENYI_H_
