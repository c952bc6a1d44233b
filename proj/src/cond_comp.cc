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

#include "balloc/cond_comp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "balloc/errors.h"
#include "balloc/numerics.h"
#include "balloc/status_macros.h"

namespace balloc {
namespace {

constexpr double kIdenticalSq = kIdenticalTolerance * kIdenticalTolerance;

// One variational member restricted to the non-identical prefix components.
struct Member {
  std::vector<double> psi;  // aligned with `distinct`
  double kl = 0.0;
  double mean_sq_norm = 0.0;  // E_psi ||mu_j||^2
  double xi = 0.0;            // ||mu_target - E_psi mu_j|| / sigma
};

std::vector<int> DistinctFromTarget(const PrefixGeometry& geo, std::span<const int> prefix,
                                    int target) {
  std::vector<int> out;
  for (int j : prefix) {
    if (geo.SqDist(j, target) > kIdenticalSq) out.push_back(j);
  }
  return out;
}

Member MakeMember(const PrefixGeometry& geo, const std::vector<int>& distinct, int target,
                  double temperature, double sigma) {
  const size_t k = distinct.size();
  Member m;
  m.psi.resize(k);
  if (std::isinf(temperature)) {
    std::fill(m.psi.begin(), m.psi.end(), 1.0 / k);
  } else {
    double mx = kNegInf;
    for (size_t a = 0; a < k; ++a) {
      m.psi[a] = -geo.SqDist(distinct[a], target) / temperature;
      mx = std::max(mx, m.psi[a]);
    }
    double s = 0.0;
    for (double& v : m.psi) s += (v = std::exp(v - mx));
    for (double& v : m.psi) v /= s;
  }
  double to_target = 0.0, pairwise = 0.0;
  for (size_t a = 0; a < k; ++a) {
    const double pa = m.psi[a];
    if (pa == 0.0) continue;
    m.kl += pa * std::log(pa * k);
    m.mean_sq_norm += pa * geo.SqNorm(distinct[a]);
    to_target += pa * geo.SqDist(distinct[a], target);
    double row = 0.0;
    for (size_t c = 0; c < k; ++c) row += m.psi[c] * geo.SqDist(distinct[a], distinct[c]);
    pairwise += pa * row;
  }
  m.kl = std::max(m.kl, 0.0);
  m.xi = std::sqrt(std::max(0.0, to_target - 0.5 * pairwise)) / sigma;
  return m;
}

// nu_k for a reference component k (remove direction).
double RemoveNu(const PrefixGeometry& geo, const std::vector<int>& distinct, const Member& m,
                int target, int k, double sigma) {
  double mix = 0.0;
  for (size_t a = 0; a < distinct.size(); ++a) mix += m.psi[a] * geo.SqDist(k, distinct[a]);
  return (geo.SqDist(k, target) - mix) / (2.0 * sigma * sigma) - m.kl;
}

double MixtureCdf(std::span<const double> nu, double xi, double tau) {
  double s = 0.0;
  for (double v : nu) s += NormalCdf((tau - v) / xi);
  return s / static_cast<double>(nu.size());
}

// Largest tau (rounded down) with MixtureCdf(tau) <= beta.
absl::StatusOr<double> SolveMixtureQuantile(std::span<const double> nu, double xi,
                                            double beta) {
  const auto [mn, mx] = std::minmax_element(nu.begin(), nu.end());
  if (!(xi > 0)) return *mn;
  double lo = *mn - 10.0 * xi;
  double hi = *mx;
  int expansions = 0;
  while (MixtureCdf(nu, xi, lo) > beta) {
    if (++expansions > 10) return NumericalError("tail bound bisection: lower bracket not found");
    lo -= (hi - lo);
  }
  expansions = 0;
  while (MixtureCdf(nu, xi, hi) < beta) {
    if (++expansions > 10) return NumericalError("tail bound bisection: upper bracket not found");
    hi += (hi - lo);
  }
  while (hi - lo > std::max(1e-12, 4e-16 * std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (MixtureCdf(nu, xi, mid) <= beta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// L = log(c + (1 - c) e^{L'}) for the identical fraction c.
double CombineIdentical(double identical_fraction, double tau_distinct) {
  if (identical_fraction <= 0.0) return tau_distinct;
  return LogAddExp(std::log(identical_fraction),
                   std::log1p(-identical_fraction) + tau_distinct);
}

absl::Status CheckTailArgs(std::span<const int> prefix, double sigma, double beta) {
  if (prefix.empty()) return absl::InvalidArgumentError("tail bound needs i >= 2");
  if (!(sigma > 0)) return absl::InvalidArgumentError("sigma must be positive");
  if (!(beta > 0 && beta < 1)) return absl::InvalidArgumentError("beta must be in (0, 1)");
  return absl::OkStatus();
}

}  // namespace

const char* StrategyName(AllocationStrategy s) {
  switch (s) {
    case AllocationStrategy::kUnion:
      return "union";
    case AllocationStrategy::kGlobalMax:
      return "global-max";
    case AllocationStrategy::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

absl::StatusOr<AllocationStrategy> ParseStrategy(const std::string& name) {
  if (name == "union") return AllocationStrategy::kUnion;
  if (name == "global-max") return AllocationStrategy::kGlobalMax;
  if (name == "hybrid") return AllocationStrategy::kHybrid;
  return absl::InvalidArgumentError("unknown allocation strategy '" + name + "'");
}

absl::StatusOr<AllocationPlan> AllocationPlan::Create(const Schedule& schedule, double delta_e,
                                                      AllocationStrategy strategy) {
  if (!(delta_e > 0 && delta_e < 1)) {
    return absl::InvalidArgumentError("delta_E must be in (0, 1)");
  }
  return AllocationPlan(schedule, delta_e, strategy);
}

double AllocationPlan::Beta(int step) const {
  const int b = schedule_.batches();
  if (b == 1) return 0.0;
  const double per_component = delta_e_ / (b - 1);
  switch (strategy_) {
    case AllocationStrategy::kUnion:
      return per_component / schedule_.iterations();
    case AllocationStrategy::kGlobalMax:
      return per_component;
    case AllocationStrategy::kHybrid:
      return schedule_.EpochOf(step) == 1 ? per_component / schedule_.iterations()
                                          : per_component / schedule_.epochs();
  }
  return 0.0;
}

int AllocationPlan::GroupOf(int step) const {
  switch (strategy_) {
    case AllocationStrategy::kUnion:
      return step;
    case AllocationStrategy::kGlobalMax:
      return 0;
    case AllocationStrategy::kHybrid:
      return schedule_.EpochOf(step) == 1 ? step
                                          : schedule_.iterations() + schedule_.EpochOf(step);
  }
  return step;
}

double AllocationPlan::LedgerTotal() const {
  const int b = schedule_.batches();
  if (b == 1) return 0.0;
  std::map<int, double> groups;
  for (int n = 1; n <= schedule_.iterations(); ++n) groups[GroupOf(n)] = Beta(n);
  double total = 0.0;
  for (const auto& [g, beta] : groups) total += (b - 1) * beta;
  return total;
}

absl::StatusOr<std::vector<double>> ReverseHazardWeights(std::span<const double> lambdas) {
  if (lambdas.empty()) return absl::InvalidArgumentError("empty hazard vector");
  for (double l : lambdas) {
    if (!(l > 0.0 && l <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrFormat("hazard %g outside (0, 1]", l));
    }
  }
  if (lambdas[0] != 1.0) return absl::InvalidArgumentError("first hazard must equal 1");
  std::vector<double> w(lambdas.size());
  double survive = 1.0;
  for (size_t i = lambdas.size(); i-- > 0;) {
    w[i] = lambdas[i] * survive;
    survive *= 1.0 - lambdas[i];
  }
  return w;
}

double HazardFromTail(int i, double tau) {
  const double v = Sigmoid(-std::log(static_cast<double>(i - 1)) - tau);
  return std::max(v, std::numeric_limits<double>::min());
}

VariationalFamily VariationalFamily::Default() {
  return {{kInf, std::pow(10.0, -1.0), std::pow(10.0, -0.5), 1.0, std::pow(10.0, 0.5),
           10.0}};
}

PrefixGeometry PrefixGeometry::FromVectors(std::span<const std::vector<double>> vectors) {
  PrefixGeometry g(static_cast<int>(vectors.size()));
  const size_t dim = vectors.empty() ? 0 : vectors[0].size();
  std::vector<double> column(vectors.size());
  for (size_t t = 0; t < dim; ++t) {
    for (size_t j = 0; j < vectors.size(); ++j) column[j] = vectors[j][t];
    g.AppendCoordinate(column);
  }
  return g;
}

void PrefixGeometry::AppendCoordinate(std::span<const double> values) {
  const int n = size();
  for (int j = 0; j < n; ++j) {
    sq_norm_[j] += values[j] * values[j];
    for (int l = j + 1; l < n; ++l) {
      const double d = values[j] - values[l];
      sq_dist_(j, l) += d * d;
      sq_dist_(l, j) = sq_dist_(j, l);
    }
  }
}

double ElboLowerBound(std::span<const std::vector<double>> prefix,
                      std::span<const double> target, double sigma, double temperature,
                      std::span<const double> x) {
  std::vector<std::vector<double>> all(prefix.begin(), prefix.end());
  all.emplace_back(target.begin(), target.end());
  const PrefixGeometry geo = PrefixGeometry::FromVectors(all);
  const int t = static_cast<int>(prefix.size());
  std::vector<int> idx(prefix.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::vector<int> distinct = DistinctFromTarget(geo, idx, t);
  const double c = 1.0 - static_cast<double>(distinct.size()) / prefix.size();
  if (distinct.empty()) return 0.0;
  const Member m = MakeMember(geo, distinct, t, temperature, sigma);
  // E_psi log(N(x; mu_j) / N(x; mu_target)) - KL.
  double expected = 0.0;
  for (size_t a = 0; a < distinct.size(); ++a) {
    const auto& mu = prefix[distinct[a]];
    double diff = 0.0;
    for (size_t d = 0; d < x.size(); ++d) {
      diff += (x[d] - target[d]) * (x[d] - target[d]) - (x[d] - mu[d]) * (x[d] - mu[d]);
    }
    expected += m.psi[a] * diff / (2.0 * sigma * sigma);
  }
  return CombineIdentical(c, expected - m.kl);
}

absl::StatusOr<double> TailBoundAdd(const PrefixGeometry& geo, std::span<const int> prefix,
                                    int target, double sigma, double beta,
                                    const VariationalFamily& family) {
  RETURN_IF_ERROR(CheckTailArgs(prefix, sigma, beta));
  const std::vector<int> distinct = DistinctFromTarget(geo, prefix, target);
  if (distinct.empty()) return 0.0;
  const double c = 1.0 - static_cast<double>(distinct.size()) / prefix.size();
  const double z = NormalQuantile(beta);
  double best = kNegInf;
  for (double t : family.temperatures) {
    const Member m = MakeMember(geo, distinct, target, t, sigma);
    const double nu =
        (geo.SqNorm(target) - m.mean_sq_norm) / (2.0 * sigma * sigma) - m.kl;
    best = std::max(best, m.xi > 0 ? nu + m.xi * z : nu);
  }
  return CombineIdentical(c, best);
}

absl::StatusOr<double> TailBoundRemove(const PrefixGeometry& geo, std::span<const int> prefix,
                                       int target, std::span<const int> tail,
                                       std::span<const int> full, double sigma, double beta,
                                       const VariationalFamily& family) {
  RETURN_IF_ERROR(CheckTailArgs(prefix, sigma, beta));
  if (tail.empty()) return absl::InvalidArgumentError("empty tail mixture");
  const std::vector<int> distinct = DistinctFromTarget(geo, prefix, target);
  if (distinct.empty()) return 0.0;
  const double c = 1.0 - static_cast<double>(distinct.size()) / prefix.size();
  double best = kNegInf;
  std::vector<double> nu;
  for (double t : family.temperatures) {
    const Member m = MakeMember(geo, distinct, target, t, sigma);
    nu.clear();
    for (int k : tail) nu.push_back(RemoveNu(geo, distinct, m, target, k, sigma));
    ASSIGN_OR_RETURN(double tau, SolveMixtureQuantile(nu, m.xi, beta));
    if (!full.empty()) {
      nu.clear();
      for (int k : full) nu.push_back(RemoveNu(geo, distinct, m, target, k, sigma));
      ASSIGN_OR_RETURN(double tau_full, SolveMixtureQuantile(nu, m.xi, beta));
      tau = std::min(tau, tau_full);
    }
    best = std::max(best, tau);
  }
  return CombineIdentical(c, best);
}

double RemoveTailCdf(const PrefixGeometry& geo, std::span<const int> prefix, int target,
                     std::span<const int> tail, double sigma, double temperature,
                     double tau) {
  const std::vector<int> distinct = DistinctFromTarget(geo, prefix, target);
  if (distinct.empty()) return tau > 0.0 ? 1.0 : 0.0;
  const Member m = MakeMember(geo, distinct, target, temperature, sigma);
  std::vector<double> nu;
  for (int k : tail) nu.push_back(RemoveNu(geo, distinct, m, target, k, sigma));
  if (!(m.xi > 0)) {
    double count = 0;
    for (double v : nu) count += v < tau;
    return count / nu.size();
  }
  return MixtureCdf(nu, m.xi, tau);
}

absl::StatusOr<double> TailBoundAdd(std::span<const std::vector<double>> prefix,
                                    const std::vector<double>& target, double sigma,
                                    double beta, const VariationalFamily& family) {
  std::vector<std::vector<double>> all(prefix.begin(), prefix.end());
  all.push_back(target);
  const PrefixGeometry geo = PrefixGeometry::FromVectors(all);
  std::vector<int> idx(prefix.size());
  std::iota(idx.begin(), idx.end(), 0);
  return TailBoundAdd(geo, idx, static_cast<int>(prefix.size()), sigma, beta, family);
}

absl::StatusOr<double> TailBoundRemove(std::span<const std::vector<double>> prefix,
                                       const std::vector<double>& target,
                                       std::span<const std::vector<double>> tail, double sigma,
                                       double beta, const VariationalFamily& family) {
  std::vector<std::vector<double>> all(prefix.begin(), prefix.end());
  all.push_back(target);
  all.insert(all.end(), tail.begin(), tail.end());
  const PrefixGeometry geo = PrefixGeometry::FromVectors(all);
  std::vector<int> idx(prefix.size()), tail_idx(tail.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::iota(tail_idx.begin(), tail_idx.end(), static_cast<int>(prefix.size()) + 1);
  return TailBoundRemove(geo, idx, static_cast<int>(prefix.size()), tail_idx, {}, sigma, beta,
                         family);
}

absl::StatusOr<std::vector<StepDominatingPair>> BuildStepPairs(
    const MixtureMeans& means, double sigma, const AllocationPlan& plan, Direction direction,
    const CondCompOptions& options) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be positive and finite");
  }
  const int b = means.batches();
  const int n_steps = means.dimension();
  if (plan.schedule().batches() != b || plan.schedule().iterations() != n_steps) {
    return absl::InvalidArgumentError("allocation plan does not match the mixture means");
  }
  std::vector<StepDominatingPair> pairs(n_steps);
  std::map<int, int> group_floor;  // smallest lowest-group size in each group
  for (int n = 1; n <= n_steps; ++n) {
    StepDominatingPair& p = pairs[n - 1];
    p.step = n;
    p.direction = direction;
    p.sigma = sigma;
    p.order.resize(b);
    std::iota(p.order.begin(), p.order.end(), 0);
    std::stable_sort(p.order.begin(), p.order.end(), [&](int x, int y) {
      return means.at(x, n - 1) < means.at(y, n - 1);
    });
    p.sorted_scalar_means.resize(b);
    for (int i = 0; i < b; ++i) p.sorted_scalar_means[i] = means.at(p.order[i], n - 1);
    int lowest = 1;
    while (lowest < b && p.sorted_scalar_means[lowest] == p.sorted_scalar_means[0]) ++lowest;
    if (options.compute_all_hazards) lowest = 1;
    const int g = plan.GroupOf(n);
    auto it = group_floor.find(g);
    group_floor[g] = it == group_floor.end() ? lowest : std::min(it->second, lowest);
  }

  std::vector<int> all_batches(b);
  std::iota(all_batches.begin(), all_batches.end(), 0);
  std::map<int, std::vector<double>> group_hazards;
  PrefixGeometry geo(b);
  std::vector<double> column(b);
  for (int n = 1; n <= n_steps; ++n) {
    StepDominatingPair& p = pairs[n - 1];
    const int g = plan.GroupOf(n);
    std::vector<double> hz(b);
    for (int i = 1; i <= b; ++i) hz[i - 1] = 1.0 / i;
    const double beta = plan.Beta(n);
    for (int i = group_floor[g] + 1; i <= b; ++i) {
      std::span<const int> prefix(p.order.data(), i - 1);
      const int target = p.order[i - 1];
      double tau;
      if (direction == Direction::kAdd) {
        ASSIGN_OR_RETURN(tau, TailBoundAdd(geo, prefix, target, sigma, beta, options.family));
      } else {
        std::span<const int> tail(p.order.data() + i - 1, b - i + 1);
        std::span<const int> full =
            options.full_reference_check ? std::span<const int>(all_batches)
                                         : std::span<const int>();
        ASSIGN_OR_RETURN(tau, TailBoundRemove(geo, prefix, target, tail, full, sigma, beta,
                                              options.family));
      }
      hz[i - 1] = HazardFromTail(i, tau);
    }
    hz[0] = 1.0;
    p.hazards = hz;
    auto [it, inserted] = group_hazards.try_emplace(g, hz);
    if (!inserted) {
      for (int i = 0; i < b; ++i) it->second[i] = std::max(it->second[i], hz[i]);
    }
    for (int j = 0; j < b; ++j) column[j] = means.at(j, n - 1);
    geo.AppendCoordinate(column);
  }
  for (StepDominatingPair& p : pairs) {
    p.hazards = group_hazards[plan.GroupOf(p.step)];
    ASSIGN_OR_RETURN(p.weights, ReverseHazardWeights(p.hazards));
  }
  return pairs;
}

absl::StatusOr<CondCompAccountant> CondCompAccountant::Create(const MixtureMeans& means,
                                                              double sigma, double delta_e,
                                                              const CondCompOptions& options) {
  ASSIGN_OR_RETURN(AllocationPlan plan,
                   AllocationPlan::Create(means.schedule(), delta_e, options.strategy));
  std::vector<DiscretePLD> composed;
  for (Direction dir : {Direction::kRemove, Direction::kAdd}) {
    ASSIGN_OR_RETURN(std::vector<StepDominatingPair> steps,
                     BuildStepPairs(means, sigma, plan, dir, options));
    // Identical pairs are discretized once and self-composed.
    std::map<std::pair<std::vector<double>, std::vector<double>>, int64_t> counts;
    std::vector<MixGaussPair> unique;
    std::vector<int64_t> multiplicity;
    for (const StepDominatingPair& s : steps) {
      ASSIGN_OR_RETURN(MixGaussPair pair,
                       MixGaussPair::Create(s.sorted_scalar_means, s.weights, sigma, dir));
      auto key = std::make_pair(std::vector<double>(pair.means().begin(), pair.means().end()),
                                std::vector<double>(pair.weights().begin(),
                                                    pair.weights().end()));
      auto [it, inserted] = counts.try_emplace(std::move(key), unique.size());
      if (inserted) {
        unique.push_back(std::move(pair));
        multiplicity.push_back(1);
      } else {
        ++multiplicity[it->second];
      }
    }
    double h = options.grid_spacing;
    if (h <= 0.0) {
      std::vector<const MixGaussPair*> ptrs;
      for (const auto& u : unique) ptrs.push_back(&u);
      ASSIGN_OR_RETURN(h, AutoGridSpacing(ptrs, options.max_support, options.discretize));
    }
    std::vector<DiscretePLD> parts;
    for (size_t u = 0; u < unique.size(); ++u) {
      ASSIGN_OR_RETURN(DiscretePLD d, Discretize(unique[u], h, options.discretize));
      ASSIGN_OR_RETURN(DiscretePLD r, SelfCompose(d, multiplicity[u], options.compose));
      parts.push_back(std::move(r));
    }
    ASSIGN_OR_RETURN(DiscretePLD all, ComposeAll(std::move(parts), options.compose));
    composed.push_back(std::move(all));
  }
  return CondCompAccountant(std::move(composed[0]), std::move(composed[1]), delta_e,
                            plan.as_published());
}

double CondCompAccountant::Delta(double epsilon) const {
  return std::min(1.0, std::max(DeltaRemove(epsilon), DeltaAdd(epsilon)) + delta_e_);
}

absl::StatusOr<CondCompResult> CondCompAccount(const StrategyMatrix& c,
                                               const Schedule& schedule, double sigma,
                                               double epsilon, double delta_e,
                                               const CondCompOptions& options) {
  ASSIGN_OR_RETURN(MixtureMeans means, ComputeMixtureMeans(c, schedule));
  CondCompResult r;
  r.delta_e = delta_e;
  if (means.IsZero()) {
    r.delta = r.delta_remove = r.delta_add = std::max(0.0, -std::expm1(epsilon));
    return r;
  }
  ASSIGN_OR_RETURN(CondCompAccountant acc,
                   CondCompAccountant::Create(means, sigma, delta_e, options));
  r.delta = acc.Delta(epsilon);
  r.delta_remove = acc.DeltaRemove(epsilon);
  r.delta_add = acc.DeltaAdd(epsilon);
  return r;
}

}  // namespace balloc
