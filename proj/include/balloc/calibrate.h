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

#ifndef BALLOC_CALIBRATE_H_
#define BALLOC_CALIBRATE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "balloc/cond_comp.h"
#include "balloc/dense_matrix.h"
#include "balloc/mixture.h"
#include "balloc/renyi.h"
#include "balloc/schedule.h"
#include "balloc/strategy_matrix.h"

namespace balloc {

enum class Method { kRenyi, kCondComp, kBest, kMonteCarlo };
const char* MethodName(Method m);
absl::StatusOr<Method> ParseMethod(const std::string& name);

struct AccountingOptions {
  RenyiOptions renyi;
  CondCompOptions condcomp;
  // Bad-event budget for condcomp when accounting at a fixed sigma.
  double delta_e = 1e-6;
  // Share of the delta target given to delta_E during calibration.
  double delta_e_fraction = 0.5;
  int64_t mc_samples = 1'000'000;
  double mc_confidence = 0.95;
  std::optional<uint64_t> seed;
};

struct PrivacyPoint {
  double epsilon = 0.0;
  double delta = 1.0;
  double delta_remove = 1.0;
  double delta_add = 1.0;
  Method method = Method::kRenyi;
  // Method that produced `delta` (differs from `method` only for kBest).
  Method source = Method::kRenyi;
  int alpha = 0;           // Renyi only
  double delta_e = 0.0;    // condcomp only
  double ci_low = 0.0;     // Monte Carlo only
  double ci_high = 0.0;
};

inline constexpr double kSigmaStart = 0.25;
inline constexpr double kSigmaMax = 65536.0;

// Accounting front end bound to one matrix and schedule.
class Accountant {
 public:
  static absl::StatusOr<Accountant> Create(const StrategyMatrix& c, const Schedule& schedule,
                                           AccountingOptions options);

  const Schedule& schedule() const { return means_.schedule(); }
  const MixtureMeans& means() const { return means_; }
  const AccountingOptions& options() const { return options_; }
  int bandwidth() const { return bandwidth_; }

  // Epsilons must be ascending. Output deltas are non-increasing.
  absl::StatusOr<std::vector<PrivacyPoint>> Profile(Method method, double sigma,
                                                    std::span<const double> epsilons) const;
  absl::StatusOr<PrivacyPoint> Account(Method method, double sigma, double epsilon) const;

  // Smallest sigma on a log-bisection grid (relative tolerance tol) whose delta
  // at epsilon is <= delta_target.
  absl::StatusOr<double> Calibrate(Method method, double epsilon, double delta_target,
                                   double tol = 1e-3) const;

 private:
  Accountant(MixtureMeans means, DenseMatrix gram, int bandwidth, AccountingOptions options)
      : means_(std::move(means)),
        gram_(std::move(gram)),
        bandwidth_(bandwidth),
        options_(std::move(options)) {}

  absl::StatusOr<std::vector<PrivacyPoint>> ProfileWithDeltaE(
      Method method, double sigma, std::span<const double> epsilons, double delta_e) const;

  MixtureMeans means_;
  DenseMatrix gram_;
  int bandwidth_;
  AccountingOptions options_;
};

// Generic sigma search over a monotone predicate ok(sigma).
template <typename Pred>
absl::StatusOr<double> BisectSigma(Pred&& ok, double tol);

}  // namespace balloc

#include "balloc/calibrate_inl.h"

#endif  // BALLOC_CALIBRATE_H_
