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

#ifndef BALLOC_MIXTURE_H_
#define BALLOC_MIXTURE_H_

#include <span>

#include "absl/status/statusor.h"
#include "balloc/dense_matrix.h"
#include "balloc/schedule.h"
#include "balloc/strategy_matrix.h"

namespace balloc {

// The b mixture means m_i = sum_j |C|[:, i + j b], each of length N.
class MixtureMeans {
 public:
  MixtureMeans(Schedule schedule, DenseMatrix means)
      : schedule_(schedule), means_(std::move(means)) {}

  const Schedule& schedule() const { return schedule_; }
  int batches() const { return means_.rows(); }
  int dimension() const { return means_.cols(); }
  // 0-based batch index.
  std::span<const double> mean(int batch) const {
    return {means_.row(batch), static_cast<size_t>(means_.cols())};
  }
  double at(int batch, int coord) const { return means_(batch, coord); }
  const DenseMatrix& matrix() const { return means_; }
  bool IsZero() const;

 private:
  Schedule schedule_;
  DenseMatrix means_;  // b x N
};

absl::StatusOr<MixtureMeans> ComputeMixtureMeans(const StrategyMatrix& c,
                                                 const Schedule& schedule);

// Builds means directly (tests, tail-bound instances). Rejects negative entries.
absl::StatusOr<MixtureMeans> MixtureMeansFromRows(const Schedule& schedule,
                                                  const DenseMatrix& rows);

DenseMatrix Gram(const MixtureMeans& means);

int CyclicDistance(int i, int j, int b);

struct GramSummary {
  DenseMatrix gram;
  int bandwidth = 1;
  DenseMatrix banded;  // max(G - tau, 0) inside the cyclic band, 0 outside
  double tau = 0.0;
};

absl::StatusOr<GramSummary> CyclicTruncate(const DenseMatrix& gram, int p);

}  // namespace balloc

#endif  // BALLOC_MIXTURE_H_
