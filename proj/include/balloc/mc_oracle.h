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

#ifndef BALLOC_MC_ORACLE_H_
#define BALLOC_MC_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "balloc/mixture.h"
#include "balloc/pld.h"

namespace balloc {

struct MCEstimate {
  double epsilon = 0.0;
  Direction direction = Direction::kRemove;
  double point_estimate = 0.0;
  double std_error = 0.0;
  // Normal-approximation interval.
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Hoeffding interval (integrand in [0, 1]).
  double hoeffding_low = 0.0;
  double hoeffding_high = 0.0;
  int64_t n_samples = 0;
  double confidence = 0.95;
  uint64_t seed = 0;
};

inline constexpr int64_t kMinMcSamples = 1000;

// Estimates the hockey-stick divergence of the full dominating pair at every
// epsilon from one shared sample set. Deterministic in (seed, n_samples).
absl::StatusOr<std::vector<MCEstimate>> McDeltaProfile(const MixtureMeans& means, double sigma,
                                                       std::span<const double> epsilons,
                                                       Direction direction, int64_t n_samples,
                                                       double confidence, uint64_t seed);

absl::StatusOr<MCEstimate> McDelta(const MixtureMeans& means, double sigma, double epsilon,
                                   Direction direction, int64_t n_samples, double confidence,
                                   uint64_t seed);

// L(x) = log(mean_j N(x; numerator_j) / N(x; denominator)), x drawn from the
// uniform mixture of N(reference_k, sigma^2 I).
struct TernaryLossSpec {
  std::vector<std::vector<double>> numerator;
  std::vector<double> denominator;
  std::vector<std::vector<double>> reference;
};

// Empirical frequency of L(x) < tau.
absl::StatusOr<double> McExceedance(const TernaryLossSpec& spec, double sigma, double tau,
                                    int64_t n_samples, uint64_t seed);

}  // namespace balloc

#endif  // BALLOC_MC_ORACLE_H_
