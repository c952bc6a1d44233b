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
#include <random>
#include <sstream>
#include <vector>

#include "balloc/errors.h"
#include "balloc/matrix_io.h"
#include "balloc/mixture.h"
#include "balloc/numerics.h"
#include "balloc/schedule.h"
#include "balloc/strategy_matrix.h"
#include "gtest/gtest.h"

namespace balloc {
namespace {

std::vector<double> Conv(const std::vector<double>& a, const std::vector<double>& b, int len) {
  std::vector<double> out(len, 0.0);
  for (int t = 0; t < len; ++t) {
    for (int u = 0; u <= t; ++u) {
      if (u < static_cast<int>(a.size()) && t - u < static_cast<int>(b.size())) {
        out[t] += a[u] * b[t - u];
      }
    }
  }
  return out;
}

TEST(Numerics, LogAddExpHandlesInfinities) {
  EXPECT_EQ(LogAddExp(kNegInf, 3.0), 3.0);
  EXPECT_EQ(LogAddExp(kNegInf, kNegInf), kNegInf);
  EXPECT_NEAR(LogAddExp(0.0, 0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(LogAddExp(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-12);
  std::vector<double> v{-1.0, 2.0, kNegInf, 0.5};
  EXPECT_NEAR(LogSumExp(v), std::log(std::exp(-1.0) + std::exp(2.0) + std::exp(0.5)), 1e-14);
}

TEST(Numerics, NormalQuantileInvertsCdf) {
  EXPECT_NEAR(NormalCdf(-2.0), 0.022750131948179195, 1e-16);
  for (double p : {1e-300, 1e-12, 0.02275, 0.3, 0.5, 0.9, 1 - 1e-10}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)) / p, 1.0, 1e-9) << p;
  }
  EXPECT_NEAR(NormalSf(3.0), NormalCdf(-3.0), 1e-18);
  EXPECT_EQ(Sigmoid(0.0), 0.5);
}

TEST(Numerics, LogFactorial) {
  LogFactorialTable t(10);
  EXPECT_EQ(t(0), 0.0);
  EXPECT_NEAR(t(5), std::log(120.0), 1e-13);
  EXPECT_NEAR(t(10), std::log(3628800.0), 1e-12);
}

TEST(Schedule, Invariants) {
  auto s = Schedule::Create(4, 100);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->iterations(), 400);
  EXPECT_EQ(s->EpochOf(100), 1);
  EXPECT_EQ(s->EpochOf(101), 2);
  EXPECT_FALSE(Schedule::Create(0, 3).ok());
  EXPECT_FALSE(Schedule::Create(2, 0).ok());
}

TEST(StrategyMatrix, IdentityExpansion) {
  auto c = BuildIdentity(3);
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->kind(), StrategyMatrix::Kind::kToeplitz);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ((*c)(i, j), i == j ? 1.0 : 0.0);
  }
  auto one = BuildIdentity(1);
  ASSERT_TRUE(one.ok());
  EXPECT_EQ((*one)(0, 0), 1.0);
  EXPECT_EQ(KindOf(BuildIdentity(0).status()), ErrorKind::kInvalidArgument);
}

TEST(StrategyMatrix, DenseRejectsUpperTriangle) {
  EXPECT_FALSE(StrategyMatrix::Dense(2, {1, 0.5, 0, 1}).ok());
  EXPECT_TRUE(StrategyMatrix::Dense(2, {1, 1e-13, 0, 1}).ok());
  EXPECT_FALSE(StrategyMatrix::Dense(2, {1, 0, NAN, 1}).ok());
  EXPECT_FALSE(StrategyMatrix::Toeplitz(2, {1, 2, 3}).ok());
}

TEST(StrategyMatrix, SqrtCoefficients) {
  auto c1 = SqrtToeplitzCoefficients(1);
  ASSERT_TRUE(c1.ok());
  EXPECT_EQ(*c1, std::vector<double>{1.0});
  auto c = SqrtToeplitzCoefficients(4);
  ASSERT_TRUE(c.ok());
  const std::vector<double> want{1, 0.5, 0.375, 0.3125};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR((*c)[i], want[i], 1e-15);
  for (int len : {7, 64, 300}) {
    auto cc = SqrtToeplitzCoefficients(len);
    ASSERT_TRUE(cc.ok());
    for (double v : Conv(*cc, *cc, len)) EXPECT_NEAR(v, 1.0, 1e-12);
  }
}

TEST(StrategyMatrix, InvSqrtCoefficients) {
  auto d = InvSqrtToeplitzCoefficients(4);
  ASSERT_TRUE(d.ok());
  const std::vector<double> want{1, -0.5, -0.125, -0.0625};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR((*d)[i], want[i], 1e-15);
  for (int len : {1, 9, 50}) {
    auto c = SqrtToeplitzCoefficients(len);
    auto dd = InvSqrtToeplitzCoefficients(len);
    ASSERT_TRUE(c.ok() && dd.ok());
    auto prod = Conv(*c, *dd, len);
    for (int t = 0; t < len; ++t) EXPECT_NEAR(prod[t], t == 0 ? 1.0 : 0.0, 1e-10);
  }
}

TEST(StrategyMatrix, InvertBandedToeplitz) {
  const std::vector<double> one{1.0};
  auto id = InvertBandedToeplitz(one, 5);
  ASSERT_TRUE(id.ok());
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ((*id)(i, j), i == j ? 1.0 : 0.0);
  }
  const std::vector<double> diff{1.0, -1.0};
  auto prefix = InvertBandedToeplitz(diff, 3);
  ASSERT_TRUE(prefix.ok());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR((*prefix)(i, 0), 1.0, 1e-15);
  const std::vector<double> half{1.0, -0.5};
  auto geo = InvertBandedToeplitz(half, 4);
  ASSERT_TRUE(geo.ok());
  const std::vector<double> want{1, 0.5, 0.25, 0.125};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR((*geo)(i, 0), want[i], 1e-15);
  const std::vector<double> zero{0.0, 1.0};
  EXPECT_EQ(KindOf(InvertBandedToeplitz(zero, 3).status()), ErrorKind::kSingular);
}

TEST(StrategyMatrix, InvertBandedTimesBandedIsIdentity) {
  auto d = InvSqrtToeplitzCoefficients(6);
  ASSERT_TRUE(d.ok());
  const int n = 256;
  auto c = InvertBandedToeplitz(*d, n);
  ASSERT_TRUE(c.ok());
  // (D C)[i][j] with D the banded expansion of d.
  double worst = 0;
  for (int i = 0; i < n; i += 5) {
    for (int j = 0; j < n; j += 3) {
      double s = 0;
      for (int t = 0; t < static_cast<int>(d->size()) && i - t >= 0; ++t) {
        s += (*d)[t] * (*c)(i - t, j);
      }
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(StrategyMatrix, NaturalBandwidth) {
  auto bsr = StrategyMatrix::Toeplitz(10, {1, 0.5, 0.375, 0.3125});
  ASSERT_TRUE(bsr.ok());
  EXPECT_EQ(bsr->NaturalBandwidth(), 4);
  auto dense = StrategyMatrix::Dense(3, {1, 0, 0, 0, 1, 0, 2, 0, 1});
  ASSERT_TRUE(dense.ok());
  EXPECT_EQ(dense->NaturalBandwidth(), 3);
}

TEST(MixtureMeans, ColumnPicking) {
  auto sch = Schedule::Create(2, 2);
  auto c = BuildIdentity(4);
  ASSERT_TRUE(sch.ok() && c.ok());
  auto m = ComputeMixtureMeans(*c, *sch);
  ASSERT_TRUE(m.ok());
  // m_1 = e_1 + e_3, m_2 = e_2 + e_4.
  EXPECT_EQ(m->at(0, 0), 1.0);
  EXPECT_EQ(m->at(0, 1), 0.0);
  EXPECT_EQ(m->at(0, 2), 1.0);
  EXPECT_EQ(m->at(1, 1), 1.0);
  EXPECT_EQ(m->at(1, 3), 1.0);
  DenseMatrix g = Gram(*m);
  EXPECT_EQ(g(0, 0), 2.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 1), 2.0);
}

TEST(MixtureMeans, AbsoluteValues) {
  auto sch = Schedule::Create(1, 2);
  auto c = StrategyMatrix::Dense(2, {1, 0, -0.3, 1});
  ASSERT_TRUE(sch.ok() && c.ok());
  auto m = ComputeMixtureMeans(*c, *sch);
  ASSERT_TRUE(m.ok());
  EXPECT_NEAR(m->at(0, 1), 0.3, 1e-16);
  auto bad = Schedule::Create(1, 3);
  EXPECT_EQ(KindOf(ComputeMixtureMeans(*c, *bad).status()), ErrorKind::kInvalidArgument);
}

TEST(MixtureMeans, GramMatchesDoubleLoop) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 6, k = 2, b = 3;
  std::vector<double> vals(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) vals[i * n + j] = u(rng);
  }
  auto c = StrategyMatrix::Dense(n, vals);
  auto sch = Schedule::Create(k, b);
  ASSERT_TRUE(c.ok() && sch.ok());
  auto m = ComputeMixtureMeans(*c, *sch);
  ASSERT_TRUE(m.ok());
  DenseMatrix g = Gram(*m);
  for (int a = 0; a < b; ++a) {
    for (int bb = 0; bb < b; ++bb) {
      double s = 0;
      for (int row = 0; row < n; ++row) {
        double ma = 0, mb = 0;
        for (int e = 0; e < k; ++e) {
          ma += std::abs(vals[row * n + a + e * b]);
          mb += std::abs(vals[row * n + bb + e * b]);
        }
        s += ma * mb;
      }
      EXPECT_NEAR(g(a, bb), s, 1e-12);
    }
  }
}

TEST(MixtureMeans, ToeplitzAndDenseAgree) {
  auto coeffs = SqrtToeplitzCoefficients(5);
  ASSERT_TRUE(coeffs.ok());
  const int n = 24;
  auto t = StrategyMatrix::Toeplitz(n, *coeffs);
  ASSERT_TRUE(t.ok());
  auto d = StrategyMatrix::Dense(n, t->ToDense());
  ASSERT_TRUE(d.ok());
  for (int k : {1, 2, 3, 4}) {
    auto sch = Schedule::Create(k, n / k);
    auto mt = ComputeMixtureMeans(*t, *sch);
    auto md = ComputeMixtureMeans(*d, *sch);
    ASSERT_TRUE(mt.ok() && md.ok());
    for (int i = 0; i < sch->batches(); ++i) {
      for (int r = 0; r < n; ++r) EXPECT_NEAR(mt->at(i, r), md->at(i, r), 1e-12);
    }
  }
}

TEST(MixtureMeans, GramIsPsd) {
  auto d = InvSqrtToeplitzCoefficients(4);
  auto c = InvertBandedToeplitz(*d, 60);
  auto sch = Schedule::Create(3, 20);
  ASSERT_TRUE(c.ok() && sch.ok());
  auto m = ComputeMixtureMeans(*c, *sch);
  ASSERT_TRUE(m.ok());
  for (double v : m->matrix().data()) EXPECT_GE(v, 0.0);
  DenseMatrix g = Gram(*m);
  // Cholesky with jitter.
  const int b = g.rows();
  DenseMatrix l(b, b);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j) + (i == j ? 1e-12 : 0.0);
      EXPECT_EQ(g(i, j), g(j, i));
      for (int t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      if (i == j) {
        ASSERT_GT(s, 0.0);
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
}

TEST(CyclicTruncate, Examples) {
  DenseMatrix g(2, 2);
  g(0, 0) = g(1, 1) = 2.0;
  auto s = CyclicTruncate(g, 1);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->tau, 0.0);
  EXPECT_EQ(s->banded(0, 0), 2.0);
  EXPECT_EQ(s->banded(1, 1), 2.0);
  EXPECT_FALSE(CyclicTruncate(g, 0).ok());
  EXPECT_FALSE(CyclicTruncate(g, 3).ok());
}

TEST(CyclicTruncate, InvariantsOnRandomGram) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int b = 7;
  DenseMatrix g(b, b);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j <= i; ++j) g(i, j) = g(j, i) = u(rng);
  }
  double prev_tau = INFINITY;
  for (int p = 1; p <= b; ++p) {
    auto s = CyclicTruncate(g, p);
    ASSERT_TRUE(s.ok());
    double want_tau = 0;
    for (int i = 0; i < b; ++i) {
      for (int j = 0; j < b; ++j) {
        if (CyclicDistance(i, j, b) >= p) want_tau = std::max(want_tau, g(i, j));
      }
    }
    EXPECT_EQ(s->tau, want_tau);
    EXPECT_LE(s->tau, prev_tau);
    prev_tau = s->tau;
    for (int i = 0; i < b; ++i) {
      for (int j = 0; j < b; ++j) {
        if (CyclicDistance(i, j, b) < p) {
          EXPECT_EQ(s->banded(i, j), std::max(g(i, j) - s->tau, 0.0));
          EXPECT_LE(g(i, j), s->banded(i, j) + s->tau);
        } else {
          EXPECT_EQ(s->banded(i, j), 0.0);
          EXPECT_LE(g(i, j), s->tau);
        }
      }
    }
    if (p == b) {
      EXPECT_EQ(s->tau, 0.0);
      for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) EXPECT_EQ(s->banded(i, j), g(i, j));
      }
    }
  }
}

TEST(CyclicTruncate, BisrTauSmall) {
  auto d = InvSqrtToeplitzCoefficients(64);
  auto c = InvertBandedToeplitz(*d, 3000);
  auto sch = Schedule::Create(10, 300);
  ASSERT_TRUE(c.ok() && sch.ok());
  auto m = ComputeMixtureMeans(*c, *sch);
  ASSERT_TRUE(m.ok());
  DenseMatrix g = Gram(*m);
  auto s = CyclicTruncate(g, 64);
  ASSERT_TRUE(s.ok());
  double mx = 0;
  for (double v : g.data()) mx = std::max(mx, v);
  EXPECT_GT(s->tau, 0.0);
  EXPECT_LT(s->tau, 0.5 * mx);
}

TEST(MatrixIo, RoundTrip) {
  auto coeffs = SqrtToeplitzCoefficients(5);
  auto t = StrategyMatrix::Toeplitz(9, *coeffs);
  ASSERT_TRUE(t.ok());
  std::stringstream ss;
  ASSERT_TRUE(WriteMatrix(*t, ss).ok());
  EXPECT_EQ(ss.str().rfind("# balloc-matrix v1 kind=toeplitz n=9", 0), 0u);
  auto back = ReadMatrix(ss);
  ASSERT_TRUE(back.ok());
  ASSERT_EQ(back->kind(), StrategyMatrix::Kind::kToeplitz);
  for (size_t i = 0; i < coeffs->size(); ++i) {
    EXPECT_EQ(back->coefficients()[i], (*coeffs)[i]);
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(16, 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) vals[i * 4 + j] = u(rng);
  }
  auto dense = StrategyMatrix::Dense(4, vals);
  ASSERT_TRUE(dense.ok());
  std::stringstream ds;
  ASSERT_TRUE(WriteMatrix(*dense, ds).ok());
  auto dback = ReadMatrix(ds);
  ASSERT_TRUE(dback.ok());
  for (int i = 0; i < 16; ++i) EXPECT_EQ(dback->dense_values()[i], vals[i]);
}

TEST(MatrixIo, RejectsMalformed) {
  std::stringstream no_header("1,0\n0,1\n");
  EXPECT_FALSE(ReadMatrix(no_header).ok());
  std::stringstream upper("# balloc-matrix v1 kind=dense n=2\n1,2\n0,1\n");
  EXPECT_FALSE(ReadMatrix(upper).ok());
  std::stringstream short_rows("# balloc-matrix v1 kind=dense n=2\n1,0\n");
  EXPECT_FALSE(ReadMatrix(short_rows).ok());
  std::stringstream kind("# balloc-matrix v1 kind=sparse n=2\n1\n");
  EXPECT_FALSE(ReadMatrix(kind).ok());
  EXPECT_EQ(KindOf(LoadMatrix("/nonexistent/dir/m.txt").status()), ErrorKind::kIo);
}

}  // namespace
}  // namespace balloc
