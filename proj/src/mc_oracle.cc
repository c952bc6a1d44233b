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

#include "balloc/mc_oracle.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "balloc/numerics.h"
#include "balloc/parallel.h"
#include "balloc/philox.h"

namespace balloc {
namespace {

constexpr int64_t kChunk = 1 << 14;

struct SparseVector {
  std::vector<int> index;
  std::vector<double> value;
  double sq_norm = 0.0;
};

}  // namespace

absl::StatusOr<std::vector<MCEstimate>> McDeltaProfile(const MixtureMeans& means, double sigma,
                                                       std::span<const double> epsilons,
                                                       Direction direction, int64_t n_samples,
                                                       double confidence, uint64_t seed) {
  if (n_samples < kMinMcSamples) {
    return absl::InvalidArgumentError("need at least 1000 Monte Carlo samples");
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be positive and finite");
  }
  if (!(confidence > 0 && confidence < 1)) {
    return absl::InvalidArgumentError("confidence must be in (0, 1)");
  }
  if (epsilons.empty()) return absl::InvalidArgumentError("no epsilon values");
  const int b = means.batches();
  const int dim = means.dimension();
  std::vector<SparseVector> sparse(b);
  for (int j = 0; j < b; ++j) {
    for (int t = 0; t < dim; ++t) {
      const double v = means.at(j, t);
      if (v != 0.0) {
        sparse[j].index.push_back(t);
        sparse[j].value.push_back(v);
        sparse[j].sq_norm += v * v;
      }
    }
  }
  const size_t n_eps = epsilons.size();
  const int chunks = static_cast<int>((n_samples + kChunk - 1) / kChunk);
  std::vector<double> sums(static_cast<size_t>(chunks) * n_eps, 0.0);
  std::vector<double> sq_sums(sums.size(), 0.0);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double log_b = std::log(static_cast<double>(b));

  ParallelFor(chunks, [&](int c) {
    PhiloxStream rng(seed, static_cast<uint64_t>(c));
    std::vector<double> x(dim);
    std::vector<double> terms(b);
    const int64_t begin = static_cast<int64_t>(c) * kChunk;
    const int64_t end = std::min(n_samples, begin + kChunk);
    double* sum = sums.data() + static_cast<size_t>(c) * n_eps;
    double* sq = sq_sums.data() + static_cast<size_t>(c) * n_eps;
    for (int64_t s = begin; s < end; ++s) {
      int component = -1;
      if (direction == Direction::kRemove) {
        component = std::min(b - 1, static_cast<int>(rng.Uniform() * b));
      }
      for (int t = 0; t < dim; ++t) x[t] = sigma * rng.Normal();
      if (component >= 0) {
        const SparseVector& m = sparse[component];
        for (size_t a = 0; a < m.index.size(); ++a) x[m.index[a]] += m.value[a];
      }
      // log((1/b) sum_j exp((2 x.m_j - ||m_j||^2) / 2 sigma^2)); ||x||^2 cancels.
      for (int j = 0; j < b; ++j) {
        const SparseVector& m = sparse[j];
        double dot = 0.0;
        for (size_t a = 0; a < m.index.size(); ++a) dot += x[m.index[a]] * m.value[a];
        terms[j] = (2.0 * dot - m.sq_norm) * inv2s2;
      }
      const double loss = LogSumExp(terms) - log_b;
      const double signed_loss = direction == Direction::kRemove ? loss : -loss;
      for (size_t e = 0; e < n_eps; ++e) {
        const double v = std::max(0.0, -std::expm1(epsilons[e] - signed_loss));
        sum[e] += v;
        sq[e] += v * v;
      }
    }
  });

  const double z = NormalQuantile(0.5 + 0.5 * confidence);
  const double hoeffding =
      std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n_samples)));
  std::vector<MCEstimate> out(n_eps);
  for (size_t e = 0; e < n_eps; ++e) {
    double s = 0.0, s2 = 0.0;
    for (int c = 0; c < chunks; ++c) {
      s += sums[static_cast<size_t>(c) * n_eps + e];
      s2 += sq_sums[static_cast<size_t>(c) * n_eps + e];
    }
    const double n = static_cast<double>(n_samples);
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1));
    MCEstimate& est = out[e];
    est.epsilon = epsilons[e];
    est.direction = direction;
    est.point_estimate = std::clamp(mean, 0.0, 1.0);
    est.std_error = std::sqrt(var / n);
    est.ci_low = std::clamp(mean - z * est.std_error, 0.0, 1.0);
    est.ci_high = std::clamp(mean + z * est.std_error, 0.0, 1.0);
    est.hoeffding_low = std::clamp(mean - hoeffding, 0.0, 1.0);
    est.hoeffding_high = std::clamp(mean + hoeffding, 0.0, 1.0);
    est.n_samples = n_samples;
    est.confidence = confidence;
    est.seed = seed;
  }
  return out;
}

absl::StatusOr<MCEstimate> McDelta(const MixtureMeans& means, double sigma, double epsilon,
                                   Direction direction, int64_t n_samples, double confidence,
                                   uint64_t seed) {
  const double eps[] = {epsilon};
  auto r = McDeltaProfile(means, sigma, eps, direction, n_samples, confidence, seed);
  if (!r.ok()) return r.status();
  return (*r)[0];
}

absl::StatusOr<double> McExceedance(const TernaryLossSpec& spec, double sigma, double tau,
                                    int64_t n_samples, uint64_t seed) {
  if (n_samples < kMinMcSamples) {
    return absl::InvalidArgumentError("need at least 1000 Monte Carlo samples");
  }
  if (spec.numerator.empty() || spec.reference.empty()) {
    return absl::InvalidArgumentError("numerator and reference mixtures must be non-empty");
  }
  if (!(sigma > 0)) return absl::InvalidArgumentError("sigma must be positive");
  const size_t dim = spec.denominator.size();
  for (const auto& v : spec.numerator) {
    if (v.size() != dim) return absl::InvalidArgumentError("dimension mismatch");
  }
  for (const auto& v : spec.reference) {
    if (v.size() != dim) return absl::InvalidArgumentError("dimension mismatch");
  }
  if (tau == kNegInf) return 0.0;
  if (tau == kInf) return 1.0;
  const int chunks = static_cast<int>((n_samples + kChunk - 1) / kChunk);
  std::vector<int64_t> hits(chunks, 0);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double log_count = std::log(static_cast<double>(spec.numerator.size()));
  const int n_ref = static_cast<int>(spec.reference.size());
  ParallelFor(chunks, [&](int c) {
    PhiloxStream rng(seed, static_cast<uint64_t>(c));
    std::vector<double> x(dim);
    std::vector<double> terms(spec.numerator.size());
    const int64_t begin = static_cast<int64_t>(c) * kChunk;
    const int64_t end = std::min(n_samples, begin + kChunk);
    for (int64_t s = begin; s < end; ++s) {
      const int k = std::min(n_ref - 1, static_cast<int>(rng.Uniform() * n_ref));
      for (size_t t = 0; t < dim; ++t) x[t] = spec.reference[k][t] + sigma * rng.Normal();
      for (size_t j = 0; j < spec.numerator.size(); ++j) {
        double d = 0.0;
        for (size_t t = 0; t < dim; ++t) {
          const double u = x[t] - spec.numerator[j][t];
          d += u * u;
        }
        terms[j] = -d * inv2s2;
      }
      double d0 = 0.0;
      for (size_t t = 0; t < dim; ++t) {
        const double u = x[t] - spec.denominator[t];
        d0 += u * u;
      }
      const double loss = LogSumExp(terms) - log_count + d0 * inv2s2;
      if (loss < tau) ++hits[c];
    }
  });
  int64_t total = 0;
  for (int64_t h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(n_samples);
}

}  // namespace balloc
