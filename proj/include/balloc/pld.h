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

#ifndef BALLOC_PLD_H_
#define BALLOC_PLD_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace balloc {

// remove: (mixture, N(0, sigma)); add: (N(0, sigma), mixture).
enum class Direction { kRemove, kAdd };
const char* DirectionName(Direction d);

// Univariate pair sum_i w_i N(m_i, sigma^2) vs N(0, sigma^2), m_i >= 0.
class MixGaussPair {
 public:
  // Sorts means, merges duplicates and drops zero weights. Weights must sum
  // to 1 within 1e-9 and are renormalized.
  static absl::StatusOr<MixGaussPair> Create(std::vector<double> means,
                                             std::vector<double> weights, double sigma,
                                             Direction direction);

  std::span<const double> means() const { return means_; }
  std::span<const double> weights() const { return weights_; }
  double sigma() const { return sigma_; }
  Direction direction() const { return direction_; }

  // True when the mixture equals N(0, sigma^2).
  bool IsDegenerate() const { return means_.size() == 1 && means_[0] == 0.0; }

  // L(y) = log(mixture density / N(0) density) at y; increasing in y.
  double Loss(double y) const;
  // inf_y L(y): log of the weight at mean 0, or -inf.
  double LossInfimum() const;
  // y with L(y) = target. Requires LossInfimum() < target and !IsDegenerate().
  double SolveLoss(double target) const;

 private:
  MixGaussPair(std::vector<double> means, std::vector<double> weights, double sigma,
               Direction direction);
  double LossAndSlope(double y, double* slope) const;

  std::vector<double> means_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  double sigma_;
  Direction direction_;
};

// Exact hockey-stick divergence at threshold e^epsilon, in [0, 1].
double HockeyStick(const MixGaussPair& pair, double epsilon);

// Privacy loss distribution on the grid {(offset + j) * h}, plus an atom at +inf.
class DiscretePLD {
 public:
  DiscretePLD(double h, int64_t offset, std::vector<double> pmf, double infinity_mass);
  static DiscretePLD PointMassAtZero(double h);

  double grid_spacing() const { return h_; }
  // Grid index of pmf[0].
  int64_t offset() const { return offset_; }
  // pmf index of loss 0 (may fall outside the stored range).
  int64_t origin() const { return -offset_; }
  const std::vector<double>& pmf() const { return pmf_; }
  double infinity_mass() const { return infinity_mass_; }
  double TotalMass() const;

  double DeltaAt(double epsilon) const;

  // Columns grid_index, loss, mass; a leading comment records h, origin and
  // infinity_mass.
  void WriteCsv(std::ostream& out) const;

 private:
  double h_;
  int64_t offset_;
  std::vector<double> pmf_;
  double infinity_mass_;
};

struct DiscretizeOptions {
  double loss_floor = -50.0;
  double tail_mass = 1e-15;
};

// Loss interval [lo, hi] covered by the discretization of `pair`.
std::pair<double, double> LossRange(const MixGaussPair& pair,
                                    const DiscretizeOptions& options = {});

// Number of grid points Discretize would use at spacing h.
int64_t GridPointCount(const MixGaussPair& pair, double h,
                       const DiscretizeOptions& options = {});

// Pessimistic discretization: the induced delta curve interpolates exact
// hockey-stick values at grid thresholds linearly in e^epsilon, which lies
// above the true (convex) curve everywhere.
absl::StatusOr<DiscretePLD> Discretize(const MixGaussPair& pair, double h,
                                       const DiscretizeOptions& options = {});

// Spacing that gives every pair at most `max_support` grid points and the
// widest exactly `max_support` (when achievable).
absl::StatusOr<double> AutoGridSpacing(std::span<const MixGaussPair* const> pairs,
                                       int max_support = 1000,
                                       const DiscretizeOptions& options = {});

struct ComposeOptions {
  // Tail mass below which upper tails move to +inf and lower tails move up.
  double trim_mass = 1e-15;
  // Convolutions with combined support below this use the direct sum.
  int direct_limit = 4096;
};

absl::StatusOr<DiscretePLD> Compose(const DiscretePLD& a, const DiscretePLD& b,
                                    const ComposeOptions& options = {});
absl::StatusOr<DiscretePLD> SelfCompose(const DiscretePLD& a, int64_t times,
                                        const ComposeOptions& options = {});
// Balanced pairwise reduction.
absl::StatusOr<DiscretePLD> ComposeAll(std::vector<DiscretePLD> plds,
                                       const ComposeOptions& options = {});

// Linear convolution; exposed for tests.
std::vector<double> ConvolveDirect(std::span<const double> a, std::span<const double> b);
std::vector<double> ConvolveFft(std::span<const double> a, std::span<const double> b);

}  // namespace balloc

#endif  // BALLOC_PLD_H_
