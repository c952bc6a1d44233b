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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "balloc/calibrate.h"
#include "balloc/cond_comp.h"
#include "balloc/mc_oracle.h"
#include "balloc/mixture.h"
#include "balloc/pld.h"
#include "balloc/renyi.h"
#include "balloc/strategy_matrix.h"
#include "oracles.h"

namespace balloc {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(int id, const char* name, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

// 1. Banded DP equals brute-force enumeration on small instances.
Outcome DpMatchesBruteForce() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> pick_b(1, 6), pick_alpha(2, 4);
  std::uniform_real_distribution<double> u(0.0, 0.7), pick_sigma(0.5, 2.0);
  double worst = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int b = pick_b(rng);
    const int p = std::uniform_int_distribution<int>(1, b)(rng);
    const int alpha = pick_alpha(rng);
    const double sigma = pick_sigma(rng);
    // Vectors supported on a cyclic window of width p: cyclic bandwidth <= p.
    std::vector<std::vector<double>> v(b, std::vector<double>(b, 0.0));
    for (int i = 0; i < b; ++i) {
      for (int t = 0; t < p; ++t) v[i][(i + t) % b] = u(rng);
    }
    DenseMatrix g(b, b);
    for (int i = 0; i < b; ++i) {
      for (int j = 0; j < b; ++j) {
        double s = 0;
        for (int t = 0; t < b; ++t) s += v[i][t] * v[j][t];
        g(i, j) = s;
      }
    }
    auto summary = CyclicTruncate(g, p);
    if (!summary.ok() || summary->tau != 0.0) return {false, "tau != 0 on a banded instance"};
    auto dp = RenyiRemoveDp(*summary, sigma, alpha);
    auto bf = RenyiRemoveBruteForce(g, sigma, alpha);
    if (!dp.ok() || !bf.ok()) return {false, "evaluation error"};
    worst = std::max(worst, std::abs(*dp - *bf));
  }
  const double dt = Seconds(t0);
  return {worst <= 1e-9 && dt < 60, Fmt("max |dp - brute| = %.3g over 200 instances, %.2f s",
                                        worst, dt)};
}

// 2. Closed forms.
Outcome ClosedForms() {
  bool ok = true;
  double worst_rel = 0;
  for (double gv : {0.3, 1.0, 2.7}) {
    for (double sigma : {0.5, 1.0, 3.0}) {
      for (int alpha : {2, 3, 7, 32}) {
        DenseMatrix g(1, 1, gv);
        const double want = alpha * gv / (2 * sigma * sigma);
        auto s = CyclicTruncate(g, 1);
        auto dp = RenyiRemoveDp(*s, sigma, alpha);
        auto bf = RenyiRemoveBruteForce(g, sigma, alpha);
        const double add = RenyiAddBound(g, sigma, alpha);
        if (!dp.ok() || !bf.ok()) return {false, "evaluation error"};
        for (double got : {*dp, *bf, add}) {
          worst_rel = std::max(worst_rel, std::abs(got - want) / want);
        }
      }
    }
  }
  // Exact up to floating-point rounding of the same expression.
  ok = ok && worst_rel <= 4 * std::numeric_limits<double>::epsilon();
  DenseMatrix id(2, 2);
  id(0, 0) = id(1, 1) = 1.0;
  auto s = CyclicTruncate(id, 1);
  auto dp = RenyiRemoveDp(*s, 1.0, 2);
  auto bf = RenyiRemoveBruteForce(id, 1.0, 2);
  const double want = std::log((2 * std::exp(1.0) + 2) / 4);
  const double err = std::max(std::abs(*dp - want), std::abs(*bf - want));
  ok = ok && err <= 1e-12;
  return {ok, Fmt("b=1 max rel err %.3g; b=2 identity err %.3g", worst_rel, err)};
}

// 3. Deterministic bounds never fall below the Monte Carlo lower confidence limit.
Outcome SoundVsMonteCarlo() {
  const auto t0 = Clock::now();
  const int n = 100;
  auto sch = Schedule::Create(1, n);
  std::vector<std::pair<std::string, StrategyMatrix>> mats;
  mats.emplace_back("dpsgd", *BuildIdentity(n));
  mats.emplace_back("bsr4", *StrategyMatrix::Toeplitz(n, *SqrtToeplitzCoefficients(4)));
  const std::vector<double> eps{1, 2, 4, 8};
  const double z = 1.959963984540054;
  int checked = 0, violations = 0;
  double min_margin = INFINITY;
  for (const auto& [name, c] : mats) {
    AccountingOptions o;
    o.seed = 20260101;
    o.mc_samples = 1'000'000;
    auto acc = Accountant::Create(c, *sch, o);
    if (!acc.ok()) return {false, "accountant creation failed"};
    for (double sigma : {0.7, 1.0, 2.0}) {
      auto mr = McDeltaProfile(acc->means(), sigma, eps, Direction::kRemove, o.mc_samples,
                               0.95, *o.seed);
      auto ma = McDeltaProfile(acc->means(), sigma, eps, Direction::kAdd, o.mc_samples, 0.95,
                               *o.seed);
      auto rd = acc->Profile(Method::kRenyi, sigma, eps);
      auto cd = acc->Profile(Method::kCondComp, sigma, eps);
      if (!mr.ok() || !ma.ok() || !rd.ok() || !cd.ok()) return {false, "evaluation error"};
      for (size_t i = 0; i < eps.size(); ++i) {
        const double lo_r = (*mr)[i].point_estimate - z * (*mr)[i].std_error;
        const double lo_a = (*ma)[i].point_estimate - z * (*ma)[i].std_error;
        const double de = (*cd)[i].delta_e;
        const double margins[] = {
            (*rd)[i].delta_remove - lo_r, (*rd)[i].delta_add - lo_a,
            (*cd)[i].delta_remove + de - lo_r, (*cd)[i].delta_add + de - lo_a,
            (*rd)[i].delta - std::max(lo_r, lo_a), (*cd)[i].delta - std::max(lo_r, lo_a)};
        for (double m : margins) {
          ++checked;
          min_margin = std::min(min_margin, m);
          if (m < 0) ++violations;
        }
      }
    }
  }
  const double dt = Seconds(t0);
  return {violations == 0 && dt < 600,
          Fmt("%.0f comparisons, %.0f violations, %.1f s", checked, violations, dt) +
              Fmt(", min margin %.3g", min_margin)};
}

// 4. Tail bounds hold statistically under the correct reference measure.
Outcome TailSoundness() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int64_t samples = 1'000'000;
  int bad = 0;
  double worst = -INFINITY;
  for (int inst = 0; inst < 50; ++inst) {
    const int b = 2 + inst % 5;
    const int dim = 1 + static_cast<int>(u(rng) * 12);
    const int i = 2 + static_cast<int>(u(rng) * (b - 1));
    const double sigma = 0.4 + 1.2 * u(rng);
    const double beta = std::pow(10.0, -1.0 - 2.0 * u(rng));
    const double scale = 0.3 + 1.5 * u(rng);
    std::vector<std::vector<double>> mus(b, std::vector<double>(dim));
    for (auto& m : mus) {
      for (double& x : m) x = scale * u(rng);
    }
    std::vector<std::vector<double>> prefix(mus.begin(), mus.begin() + (i - 1));
    const std::vector<double>& target = mus[i - 1];
    const bool add = inst % 2 == 0;
    absl::StatusOr<double> tau;
    TernaryLossSpec spec;
    spec.numerator = prefix;
    spec.denominator = target;
    if (add) {
      tau = TailBoundAdd(prefix, target, sigma, beta, VariationalFamily::Default());
      spec.reference = {std::vector<double>(dim, 0.0)};
    } else {
      std::vector<std::vector<double>> tail(mus.begin() + (i - 1), mus.end());
      tau = TailBoundRemove(prefix, target, tail, sigma, beta, VariationalFamily::Default());
      spec.reference = tail;
    }
    if (!tau.ok()) return {false, "tail bound error: " + std::string(tau.status().message())};
    auto freq = McExceedance(spec, sigma, *tau, samples, 1000 + inst);
    if (!freq.ok()) return {false, "exceedance error"};
    const double se = std::sqrt(beta * (1 - beta) / samples);
    const double excess = (*freq - beta) / se;
    worst = std::max(worst, excess);
    if (*freq > beta + 3 * se) ++bad;
  }
  return {bad == 0,
          Fmt("%.0f of 50 instances above beta + 3 SE; worst (freq - beta)/SE = %.2f", bad,
              worst)};
}

// 5. PLD engine against the analytic Gaussian profile.
Outcome PldGaussian() {
  double e1 = 0, e2 = 0;
  for (Direction d : {Direction::kRemove, Direction::kAdd}) {
    auto pair = MixGaussPair::Create({1.0}, {1.0}, 1.0, d);
    auto pld = Discretize(*pair, 1e-4);
    if (!pld.ok()) return {false, "discretize error"};
    auto two = SelfCompose(*pld, 2);
    if (!two.ok()) return {false, "compose error"};
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
      e1 = std::max(e1, std::abs(pld->DeltaAt(eps) - oracle::GaussianDelta(1.0, eps)));
      e2 = std::max(e2,
                    std::abs(two->DeltaAt(eps) - oracle::GaussianDelta(std::sqrt(2.0), eps)));
    }
  }
  return {e1 <= 2e-4 && e2 <= 5e-4,
          Fmt("single max err %.3g (<= 2e-4), two-fold max err %.3g (<= 5e-4)", e1, e2)};
}

// 6. condcomp calibrates lower at small epsilon, Renyi at large epsilon.
Outcome RegimeOrdering() {
  const auto t0 = Clock::now();
  auto c = BuildIdentity(100);
  auto sch = Schedule::Create(1, 100);
  auto acc = Accountant::Create(*c, *sch, {});
  if (!acc.ok()) return {false, "accountant creation failed"};
  auto r_small = acc->Calibrate(Method::kRenyi, 0.25, 1e-5);
  auto c_small = acc->Calibrate(Method::kCondComp, 0.25, 1e-5);
  auto r_large = acc->Calibrate(Method::kRenyi, 8.0, 1e-5);
  auto c_large = acc->Calibrate(Method::kCondComp, 8.0, 1e-5);
  if (!r_small.ok() || !c_small.ok() || !r_large.ok() || !c_large.ok()) {
    return {false, "calibration error"};
  }
  const double dt = Seconds(t0);
  const bool ok = *c_small < *r_small && *r_large <= *c_large && dt < 900;
  return {ok, Fmt("eps=0.25: condcomp %.4f vs renyi %.4f; ", *c_small, *r_small) +
                  Fmt("eps=8: renyi %.4f vs condcomp %.4f; %.1f s", *r_large, *c_large, dt)};
}

// 7. DP runtime scaling at p = 1.
Outcome ComplexityScaling() {
  auto time_dp = [](int b, int alpha) {
    DenseMatrix g(b, b);
    for (int i = 0; i < b; ++i) g(i, i) = 1.0;
    auto s = CyclicTruncate(g, 1);
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      auto r = RenyiRemoveDp(*s, 1.0, alpha);
      best = std::min(best, Seconds(t0));
      if (!r.ok()) return -1.0;
    }
    return best;
  };
  const double b500 = time_dp(500, 16), b1000 = time_dp(1000, 16);
  const double a16 = time_dp(500, 16), a32 = time_dp(500, 32);
  if (b500 <= 0 || a16 <= 0) return {false, "timing error"};
  const double rb = b1000 / b500, ra = a32 / a16;
  return {rb <= 2.5 && ra <= 4.5,
          Fmt("b 500->1000 ratio %.2f (<= 2.5), alpha 16->32 ratio %.2f (<= 4.5)", rb, ra)};
}

// 8. Conversion identity and monotonicity.
Outcome ConversionIdentity() {
  bool exact = true;
  for (double e : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) exact = exact && RenyiToDelta(e, 2, e) == 0.25;
  bool mono = true;
  for (int alpha : {2, 5, 17, 64}) {
    for (double rho : {0.01, 0.5, 3.0}) {
      double prev = INFINITY;
      for (double e = 0.0; e <= 30.0; e += 0.05) {
        const double d = RenyiToDelta(rho, alpha, e);
        if (d > 0 && d < 1 && !(d < prev)) mono = false;
        if (d > prev) mono = false;
        prev = d;
      }
    }
  }
  return {exact && mono, std::string("identity ") + (exact ? "exact" : "violated") +
                             ", monotone " + (mono ? "yes" : "no")};
}

// 9. Per-step hazard bound of the largest component jumps at epoch boundaries.
Outcome EpochJumps() {
  const int k = 4, b = 100;
  auto c = BuildIdentity(k * b);
  auto sch = Schedule::Create(k, b);
  auto means = ComputeMixtureMeans(*c, *sch);
  auto plan = AllocationPlan::Create(*sch, 0.5e-5, AllocationStrategy::kUnion);
  if (!means.ok() || !plan.ok()) return {false, "setup error"};
  auto pairs = BuildStepPairs(*means, 5.0, *plan, Direction::kRemove, CondCompOptions{});
  if (!pairs.ok()) return {false, "step pair error"};
  std::vector<double> lam(k * b);
  for (int n = 0; n < k * b; ++n) lam[n] = (*pairs)[n].hazards[b - 1];
  std::vector<double> within;
  for (int n = 1; n < k * b; ++n) {
    if ((n % b) != 0) within.push_back(std::abs(lam[n] - lam[n - 1]));
  }
  std::nth_element(within.begin(), within.begin() + within.size() / 2, within.end());
  const double median = within[within.size() / 2];
  double min_jump = INFINITY;
  for (int step : {101, 201, 301}) {
    min_jump = std::min(min_jump, std::abs(lam[step - 1] - lam[step - 2]));
  }
  return {min_jump > 10 * median,
          Fmt("smallest boundary jump %.4g, median within-epoch change %.4g (ratio %.1f)",
              min_jump, median, median > 0 ? min_jump / median : INFINITY)};
}

}  // namespace
}  // namespace balloc

int main() {
  using namespace balloc;
  Report(1, "dp_bruteforce_equivalence", DpMatchesBruteForce());
  Report(2, "closed_forms", ClosedForms());
  Report(8, "conversion_identity", ConversionIdentity());
  Report(5, "pld_gaussian_oracle", PldGaussian());
  Report(7, "complexity_scaling", ComplexityScaling());
  Report(9, "epoch_jumps", EpochJumps());
  Report(4, "tail_bound_soundness", TailSoundness());
  Report(6, "regime_ordering", RegimeOrdering());
  Report(3, "soundness_vs_monte_carlo", SoundVsMonteCarlo());
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
