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

#ifndef BALLOC_COND_COMP_H_
#define BALLOC_COND_COMP_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "balloc/dense_matrix.h"
#include "balloc/mixture.h"
#include "balloc/pld.h"
#include "balloc/schedule.h"
#include "balloc/strategy_matrix.h"

namespace balloc {

enum class AllocationStrategy { kUnion, kGlobalMax, kHybrid };
const char* StrategyName(AllocationStrategy s);
absl::StatusOr<AllocationStrategy> ParseStrategy(const std::string& name);

// Splits the bad-event budget delta_E over per-component tail bounds.
class AllocationPlan {
 public:
  static absl::StatusOr<AllocationPlan> Create(const Schedule& schedule, double delta_e,
                                               AllocationStrategy strategy);

  double delta_e() const { return delta_e_; }
  AllocationStrategy strategy() const { return strategy_; }
  const Schedule& schedule() const { return schedule_; }
  // The global-max strategy is implemented as described in the literature
  // without an independent union-bound argument.
  bool as_published() const { return strategy_ == AllocationStrategy::kGlobalMax; }

  // Per-bound significance for a 1-based step; 0 when b = 1.
  double Beta(int step) const;
  // Steps with equal group ids share one (maximized) hazard vector.
  int GroupOf(int step) const;
  // Sum of significance over distinct bound events.
  double LedgerTotal() const;

 private:
  AllocationPlan(Schedule schedule, double delta_e, AllocationStrategy strategy)
      : schedule_(schedule), delta_e_(delta_e), strategy_(strategy) {}
  Schedule schedule_;
  double delta_e_;
  AllocationStrategy strategy_;
};

// weights[i] = lambdas[i] * prod_{j > i} (1 - lambdas[j]).
absl::StatusOr<std::vector<double>> ReverseHazardWeights(std::span<const double> lambdas);

// sigmoid(-log(i - 1) - tau) for 1-based position i >= 2.
double HazardFromTail(int i, double tau);

struct VariationalFamily {
  // Softmax temperatures over -||mu_i - mu_j||^2; +inf is the uniform member.
  std::vector<double> temperatures;
  static VariationalFamily Default();
};

// Squared norms and pairwise squared distances of a set of vectors, updated
// one coordinate at a time.
class PrefixGeometry {
 public:
  explicit PrefixGeometry(int count) : sq_norm_(count, 0.0), sq_dist_(count, count, 0.0) {}
  static PrefixGeometry FromVectors(std::span<const std::vector<double>> vectors);

  int size() const { return static_cast<int>(sq_norm_.size()); }
  void AppendCoordinate(std::span<const double> values);
  double SqNorm(int j) const { return sq_norm_[j]; }
  double SqDist(int j, int l) const { return sq_dist_(j, l); }

 private:
  std::vector<double> sq_norm_;
  DenseMatrix sq_dist_;
};

// Components closer than this (Euclidean) to the target are identical.
inline constexpr double kIdenticalTolerance = 1e-12;

// Lower bound on the target-relative log-likelihood ratio
//   L_i(x) = log(mean_{j in prefix} N(x; mu_j) / N(x; mu_target))
// from the variational member at `temperature`. Identical components enter
// exactly through L = log(c + (1 - c) e^{L'}).
double ElboLowerBound(std::span<const std::vector<double>> prefix,
                      std::span<const double> target, double sigma, double temperature,
                      std::span<const double> x);

// tau with Pr[L_i(x) < tau] <= beta for x ~ N(0, sigma^2 I).
absl::StatusOr<double> TailBoundAdd(const PrefixGeometry& geo, std::span<const int> prefix,
                                    int target, double sigma, double beta,
                                    const VariationalFamily& family);

// tau with Pr[L_i(x) < tau] <= beta for x drawn from the uniform mixture of
// N(mu_k, sigma^2 I), k in `tail`. With `full` non-empty, tau also satisfies
// the same bound for the uniform mixture over `full`.
absl::StatusOr<double> TailBoundRemove(const PrefixGeometry& geo, std::span<const int> prefix,
                                       int target, std::span<const int> tail,
                                       std::span<const int> full, double sigma, double beta,
                                       const VariationalFamily& family);

// Vector-valued convenience forms. `tail` lists mu_i ... mu_b.
absl::StatusOr<double> TailBoundAdd(std::span<const std::vector<double>> prefix,
                                    const std::vector<double>& target, double sigma,
                                    double beta, const VariationalFamily& family);
absl::StatusOr<double> TailBoundRemove(std::span<const std::vector<double>> prefix,
                                       const std::vector<double>& target,
                                       std::span<const std::vector<double>> tail, double sigma,
                                       double beta, const VariationalFamily& family);

// (1/K) sum_k Phi((tau - nu_k) / xi_k) at the variational member with the
// given temperature; exposed for tests.
double RemoveTailCdf(const PrefixGeometry& geo, std::span<const int> prefix, int target,
                     std::span<const int> tail, double sigma, double temperature,
                     double tau);

struct StepDominatingPair {
  int step = 1;
  Direction direction = Direction::kRemove;
  double sigma = 1.0;
  std::vector<double> sorted_scalar_means;
  std::vector<double> hazards;
  std::vector<double> weights;
  // Batch index at each sorted position.
  std::vector<int> order;
};

struct CondCompOptions {
  AllocationStrategy strategy = AllocationStrategy::kHybrid;
  VariationalFamily family = VariationalFamily::Default();
  // 0 picks the spacing automatically from max_support.
  double grid_spacing = 0.0;
  int max_support = 1000;
  DiscretizeOptions discretize;
  ComposeOptions compose;
  // Also bound hazards inside the lowest tied group of scalar means, which
  // cannot change the pair.
  bool compute_all_hazards = false;
  // Remove direction: also require the bound under the mixture over all b
  // components, not only the tail components.
  bool full_reference_check = true;
};

absl::StatusOr<std::vector<StepDominatingPair>> BuildStepPairs(
    const MixtureMeans& means, double sigma, const AllocationPlan& plan, Direction direction,
    const CondCompOptions& options);

// Composed per-direction PLDs for one sigma; evaluates delta at any epsilon.
class CondCompAccountant {
 public:
  static absl::StatusOr<CondCompAccountant> Create(const MixtureMeans& means, double sigma,
                                                   double delta_e,
                                                   const CondCompOptions& options);

  // Composed delta plus delta_E.
  double Delta(double epsilon) const;
  double DeltaRemove(double epsilon) const { return remove_.DeltaAt(epsilon); }
  double DeltaAdd(double epsilon) const { return add_.DeltaAt(epsilon); }
  double delta_e() const { return delta_e_; }
  const DiscretePLD& remove_pld() const { return remove_; }
  const DiscretePLD& add_pld() const { return add_; }
  bool as_published() const { return as_published_; }

 private:
  CondCompAccountant(DiscretePLD remove, DiscretePLD add, double delta_e, bool as_published)
      : remove_(std::move(remove)),
        add_(std::move(add)),
        delta_e_(delta_e),
        as_published_(as_published) {}
  DiscretePLD remove_;
  DiscretePLD add_;
  double delta_e_;
  bool as_published_;
};

struct CondCompResult {
  double delta = 1.0;
  double delta_remove = 1.0;
  double delta_add = 1.0;
  double delta_e = 0.0;
};

absl::StatusOr<CondCompResult> CondCompAccount(const StrategyMatrix& c,
                                               const Schedule& schedule, double sigma,
                                               double epsilon, double delta_e,
                                               const CondCompOptions& options);

}  // namespace balloc

#endif  // BALLOC_COND_COMP_H_
