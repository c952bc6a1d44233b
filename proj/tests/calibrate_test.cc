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

#include <cmath>
#include <vector>

#include "balloc/calibrate.h"
#include "balloc/errors.h"
#include "balloc/strategy_matrix.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace balloc {
namespace {

Accountant Make(int n, int k, AccountingOptions o = {}) {
  auto c = BuildIdentity(n);
  auto sch = Schedule::Create(k, n / k);
  auto a = Accountant::Create(*c, *sch, std::move(o));
  EXPECT_TRUE(a.ok());
  return *std::move(a);
}

TEST(Method, Parse) {
  EXPECT_EQ(*ParseMethod("renyi"), Method::kRenyi);
  EXPECT_EQ(*ParseMethod("condcomp"), Method::kCondComp);
  EXPECT_EQ(*ParseMethod("best"), Method::kBest);
  EXPECT_EQ(*ParseMethod("mc"), Method::kMonteCarlo);
  EXPECT_FALSE(ParseMethod("exact").ok());
  EXPECT_STREQ(MethodName(Method::kCondComp), "condcomp");
}

TEST(BisectSigma, FindsThreshold) {
  auto s = BisectSigma([](double sigma) -> absl::StatusOr<bool> { return sigma >= 3.3; }, 1e-4);
  ASSERT_TRUE(s.ok());
  EXPECT_GE(*s, 3.3);
  EXPECT_LE(*s, 3.3 * (1 + 1e-4));
  auto small = BisectSigma([](double sigma) -> absl::StatusOr<bool> { return sigma >= 0.01; },
                           1e-3);
  ASSERT_TRUE(small.ok());
  EXPECT_NEAR(*small, 0.01, 1e-5);
  auto never = BisectSigma([](double) -> absl::StatusOr<bool> { return false; }, 1e-3);
  EXPECT_EQ(KindOf(never.status()), ErrorKind::kUnachievable);
}

TEST(Accountant, BestIsMinimumOfDeterministic) {
  Accountant a = Make(40, 1);
  const std::vector<double> eps{0.25, 1.0, 4.0};
  auto r = a.Profile(Method::kRenyi, 1.2, eps);
  auto c = a.Profile(Method::kCondComp, 1.2, eps);
  auto b = a.Profile(Method::kBest, 1.2, eps);
  ASSERT_TRUE(r.ok() && c.ok() && b.ok());
  for (size_t i = 0; i < eps.size(); ++i) {
    EXPECT_EQ((*b)[i].delta, std::min((*r)[i].delta, (*c)[i].delta));
    EXPECT_EQ((*b)[i].method, Method::kBest);
    EXPECT_NE((*b)[i].source, Method::kMonteCarlo);
  }
}

TEST(Accountant, MonteCarloNeedsSeed) {
  Accountant a = Make(10, 1);
  EXPECT_EQ(KindOf(a.Account(Method::kMonteCarlo, 1.0, 1.0).status()),
            ErrorKind::kInvalidArgument);
  AccountingOptions o;
  o.seed = 5;
  o.mc_samples = 20000;
  Accountant b = Make(10, 1, o);
  auto p = b.Account(Method::kMonteCarlo, 1.0, 1.0);
  ASSERT_TRUE(p.ok());
  EXPECT_LE(p->ci_low, p->delta);
  EXPECT_GE(p->ci_high, p->delta);
}

TEST(Accountant, ZeroMechanism) {
  auto c = StrategyMatrix::Toeplitz(6, {0.0});
  auto sch = Schedule::Create(2, 3);
  auto a = Accountant::Create(*c, *sch, {});
  ASSERT_TRUE(a.ok());
  for (Method m : {Method::kRenyi, Method::kCondComp, Method::kBest}) {
    auto p = a->Account(m, 1.0, 0.0);
    ASSERT_TRUE(p.ok());
    EXPECT_EQ(p->delta, 0.0);
  }
  auto s = a->Calibrate(Method::kRenyi, 1.0, 1e-5);
  ASSERT_TRUE(s.ok());
}

TEST(Accountant, RejectsBadInput) {
  Accountant a = Make(10, 1);
  const std::vector<double> desc{1.0, 0.5};
  EXPECT_FALSE(a.Profile(Method::kRenyi, 1.0, desc).ok());
  EXPECT_FALSE(a.Account(Method::kRenyi, 0.0, 1.0).ok());
  EXPECT_FALSE(a.Calibrate(Method::kRenyi, 1.0, 0.0).ok());
  EXPECT_FALSE(a.Calibrate(Method::kRenyi, 1.0, 1.5).ok());
}

TEST(Calibrate, GaussianMechanismRenyi) {
  // b = 1, N = 1: delta(sigma) is the Renyi conversion of alpha/(2 sigma^2).
  Accountant a = Make(1, 1);
  const double eps = 1.0, target = 1e-5;
  auto s = a.Calibrate(Method::kRenyi, eps, target, 1e-6);
  ASSERT_TRUE(s.ok());
  auto at = a.Account(Method::kRenyi, *s, eps);
  auto below = a.Account(Method::kRenyi, *s / (1 + 2e-6), eps);
  ASSERT_TRUE(at.ok() && below.ok());
  EXPECT_LE(at->delta, target);
  EXPECT_GT(below->delta, target);
}

TEST(Calibrate, MonotoneInEpsilon) {
  Accountant a = Make(30, 1);
  double prev = INFINITY;
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    auto s = a.Calibrate(Method::kRenyi, eps, 1e-5);
    ASSERT_TRUE(s.ok());
    EXPECT_LT(*s, prev);
    prev = *s;
  }
}

TEST(Calibrate, CondCompUsesDeltaSplit) {
  Accountant a = Make(20, 1);
  auto s = a.Calibrate(Method::kCondComp, 1.0, 1e-5, 1e-3);
  ASSERT_TRUE(s.ok());
  // At the returned sigma, the composed part fits in the other half.
  auto acc = CondCompAccountant::Create(a.means(), *s, 0.5e-5, a.options().condcomp);
  ASSERT_TRUE(acc.ok());
  EXPECT_LE(acc->Delta(1.0), 1e-5);
  auto best = a.Calibrate(Method::kBest, 1.0, 1e-5, 1e-3);
  auto renyi = a.Calibrate(Method::kRenyi, 1.0, 1e-5, 1e-3);
  ASSERT_TRUE(best.ok() && renyi.ok());
  EXPECT_EQ(*best, std::min(*s, *renyi));
}

TEST(Calibrate, UnachievableTarget) {
  Accountant a = Make(20, 1);
  // The Renyi bound at eps = 1 never drops below about e^-63.
  auto s = a.Calibrate(Method::kRenyi, 1.0, 1e-300);
  EXPECT_EQ(KindOf(s.status()), ErrorKind::kUnachievable);
}

}  // namespace
}  // namespace balloc
