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

#include "balloc/renyi.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "balloc/errors.h"
#include "balloc/numerics.h"
#include "balloc/parallel.h"
#include "balloc/status_macros.h"

namespace balloc {
namespace {

// DP key: byte 0 holds the partial count m, bytes 1.. the suffix counts.
constexpr int kMaxSuffix = 15;
constexpr int kMaxAlpha = 255;
using Key = std::array<uint8_t, kMaxSuffix + 1>;
using StateMap = absl::flat_hash_map<Key, double>;

struct DpPlan {
  bool prefix_mode = false;
  int window = 1;
};

// Wrap-around pairs (i, q) that the forward pass cannot see: i in the prefix,
// q in the final suffix, linear distance >= p but cyclic distance < p.
bool IsWrapPair(int i, int q, int b, int p) {
  return i <= p - 2 && q >= b - p + 1 && q - i >= p && b - (q - i) < p;
}

DpPlan PlanDp(const GramSummary& s) {
  const int b = s.banded.rows();
  const int p = s.bandwidth;
  if (p == 1) return {false, 1};
  if (b < 2 * p - 2) return {false, b};
  for (int i = 0; i <= p - 2; ++i) {
    for (int q = b - p + 1; q < b; ++q) {
      if (IsWrapPair(i, q, b, p) && s.banded(i, q) != 0.0) return {true, p};
    }
  }
  return {false, p};
}

double LogBinomial(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Runs positions [begin, b). All states share suffix length `len`. The last
// position only takes the transition that completes m to alpha.
void RunForward(const DenseMatrix& g, double c, int alpha, int window, int begin, int len,
                const LogFactorialTable& logfact, StateMap& states) {
  const int b = g.rows();
  StateMap next;
  for (int k = begin; k < b; ++k) {
    next.clear();
    next.reserve(states.size() * 2);
    const bool last = k == b - 1;
    const double gkk = g(k, k);
    const bool shift = window > 1 && len == window - 1;
    const int new_len = window == 1 ? 0 : (shift ? len : len + 1);
    for (const auto& [key, lw] : states) {
      const int m = key[0];
      double s1 = 0.0;
      for (int i = 0; i < len; ++i) s1 += g(k, k - len + i) * key[1 + i];
      s1 *= 2.0;
      Key nk{};
      if (shift) {
        for (int i = 0; i + 1 < len; ++i) nk[1 + i] = key[2 + i];
      } else {
        for (int i = 0; i < len; ++i) nk[1 + i] = key[1 + i];
      }
      for (int t = last ? alpha - m : 0; t <= alpha - m; ++t) {
        const double w = lw + c * (gkk * t * (t - 1) + s1 * t) - logfact(t);
        nk[0] = static_cast<uint8_t>(m + t);
        if (new_len > 0) nk[new_len] = static_cast<uint8_t>(t);
        auto [it, inserted] = next.try_emplace(nk, w);
        if (!inserted) it->second = LogAddExp(it->second, w);
      }
    }
    states.swap(next);
    len = new_len;
  }
}

}  // namespace

std::vector<int> DefaultAlphas() {
  std::vector<int> a;
  for (int i = 2; i <= 64; ++i) a.push_back(i);
  return a;
}

absl::StatusOr<double> RenyiRemoveBruteForce(const DenseMatrix& gram, double sigma,
                                             int alpha) {
  const int b = gram.rows();
  if (b < 1 || gram.cols() != b) return absl::InvalidArgumentError("bad Gram matrix");
  if (alpha < 2) return absl::InvalidArgumentError("alpha must be >= 2");
  if (!(sigma > 0)) return absl::InvalidArgumentError("sigma must be positive");
  if (alpha * std::log(static_cast<double>(b)) > std::log(kBruteForceLimit) + 1e-12) {
    return TooLargeError(absl::StrFormat("b^alpha = %d^%d exceeds the enumeration guard",
                                         b, alpha));
  }
  const double c = 1.0 / (2.0 * sigma * sigma);
  std::vector<int> r(alpha, 0);
  std::vector<int> cnt(b, 0);
  double mx = kNegInf;
  double acc = 0.0;
  while (true) {
    // Sum over ordered pairs j1 != j2 of G[r_j1][r_j2], grouped by index counts.
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int v : r) ++cnt[v];
    double e = 0.0;
    for (int i = 0; i < b; ++i) {
      if (cnt[i] == 0) continue;
      for (int k = 0; k < b; ++k) {
        if (cnt[k] == 0) continue;
        const double pairs = static_cast<double>(cnt[i]) * (i == k ? cnt[i] - 1 : cnt[k]);
        e += gram(i, k) * pairs;
      }
    }
    e *= c;
    if (e > mx) {
      acc = acc * std::exp(mx - e) + 1.0;
      mx = e;
    } else {
      acc += std::exp(e - mx);
    }
    int pos = 0;
    while (pos < alpha && ++r[pos] == b) r[pos++] = 0;
    if (pos == alpha) break;
  }
  const double log_s = mx + std::log(acc);
  return (log_s - alpha * std::log(static_cast<double>(b))) / (alpha - 1);
}

double EstimateDpCost(const GramSummary& summary, int alpha) {
  const int b = summary.banded.rows();
  const DpPlan plan = PlanDp(summary);
  const int l = plan.window - 1;
  double log_cost = std::log(static_cast<double>(b)) + LogBinomial(alpha + l + 2, l + 2);
  if (plan.prefix_mode) log_cost += LogBinomial(alpha + l, l);
  return std::exp(log_cost);
}

absl::StatusOr<double> RenyiRemoveDp(const GramSummary& summary, double sigma, int alpha) {
  const DenseMatrix& g = summary.banded;
  const int b = g.rows();
  const int p = summary.bandwidth;
  if (b < 1 || g.cols() != b) return absl::InvalidArgumentError("bad Gram summary");
  if (p < 1 || p > b) return absl::InvalidArgumentError("bandwidth outside [1, b]");
  if (alpha < 2 || alpha > kMaxAlpha) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be in [2, %d], got %d", kMaxAlpha, alpha));
  }
  if (!(sigma > 0)) return absl::InvalidArgumentError("sigma must be positive");
  const DpPlan plan = PlanDp(summary);
  if (plan.window - 1 > kMaxSuffix) {
    return TooLargeError(absl::StrFormat(
        "DP window %d exceeds the supported suffix length %d", plan.window, kMaxSuffix));
  }
  const double c = 1.0 / (2.0 * sigma * sigma);
  // One component: a single term, evaluated directly to avoid log(alpha!) cancellation.
  if (b == 1) return std::max(alpha * g(0, 0) * c + summary.tau * alpha * c, 0.0);
  const LogFactorialTable logfact(alpha);

  double log_s = kNegInf;
  if (!plan.prefix_mode) {
    StateMap states;
    states.emplace(Key{}, 0.0);
    RunForward(g, c, alpha, plan.window, 0, 0, logfact, states);
    for (const auto& [key, lw] : states) log_s = LogAddExp(log_s, lw);
  } else {
    const int l = p - 1;
    std::vector<std::pair<int, int>> wrap;
    for (int i = 0; i < l; ++i) {
      for (int q = b - l; q < b; ++q) {
        if (IsWrapPair(i, q, b, p) && g(i, q) != 0.0) wrap.emplace_back(i, q);
      }
    }
    std::vector<int> pre(l, 0);
    while (true) {
      int sum = 0;
      for (int v : pre) sum += v;
      if (sum <= alpha) {
        double seed = 0.0;
        for (int i = 0; i < l; ++i) {
          seed += c * g(i, i) * pre[i] * (pre[i] - 1) - logfact(pre[i]);
          for (int j = i + 1; j < l; ++j) seed += 2.0 * c * g(i, j) * pre[i] * pre[j];
        }
        Key key{};
        key[0] = static_cast<uint8_t>(sum);
        for (int i = 0; i < l; ++i) key[1 + i] = static_cast<uint8_t>(pre[i]);
        StateMap states;
        states.emplace(key, seed);
        RunForward(g, c, alpha, p, l, l, logfact, states);
        for (const auto& [k, lw] : states) {
          double closure = 0.0;
          for (const auto& [i, q] : wrap) {
            closure += 2.0 * c * g(i, q) * pre[i] * k[1 + q - (b - l)];
          }
          log_s = LogAddExp(log_s, lw + closure);
        }
      }
      // Lexicographic odometer; skip the rest of a digit once the sum overflows.
      int pos = l - 1;
      while (pos >= 0) {
        ++pre[pos];
        int s = 0;
        for (int i = 0; i <= pos; ++i) s += pre[i];
        if (s <= alpha) break;
        pre[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  if (!std::isfinite(log_s)) return NumericalError("Renyi DP produced a non-finite sum");
  const double rho = (log_s + logfact(alpha) - alpha * std::log(static_cast<double>(b))) /
                         (alpha - 1) +
                     summary.tau * alpha * c;
  return std::max(rho, 0.0);
}

double RenyiAddBound(const DenseMatrix& gram, double sigma, int alpha) {
  const int b = gram.rows();
  double diag = 0.0, total = 0.0;
  for (int i = 0; i < b; ++i) {
    diag += gram(i, i);
    for (int j = 0; j < b; ++j) total += gram(i, j);
  }
  const double s2 = sigma * sigma;
  return diag / (2.0 * b * s2) + (alpha - 1) * total / (2.0 * b * b * s2);
}

double RenyiToDelta(double rho, int alpha, double epsilon) {
  const double x = (alpha - 1) * (rho - epsilon);
  const double log_delta =
      x - std::log(alpha - 1.0) + alpha * std::log1p(-1.0 / alpha);
  if (log_delta >= 0.0) return 1.0;
  // Direct product keeps simple cases exact, e.g. 0.25 at alpha=2, rho=eps.
  const double delta =
      std::exp(x) / (alpha - 1) * std::pow(1.0 - 1.0 / alpha, alpha);
  return std::clamp(std::isfinite(delta) ? delta : std::exp(log_delta), 0.0, 1.0);
}

absl::StatusOr<RenyiCurve> ComputeRenyiCurve(const DenseMatrix& gram, double sigma,
                                             int bandwidth, const RenyiOptions& options) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be positive and finite");
  }
  const int b = gram.rows();
  std::vector<int> alphas = options.alphas.empty() ? DefaultAlphas() : options.alphas;
  for (int a : alphas) {
    if (a < 2 || a > kMaxAlpha) {
      return absl::InvalidArgumentError(absl::StrFormat("alpha %d outside [2, %d]", a,
                                                        kMaxAlpha));
    }
  }
  const int p_max = std::clamp(bandwidth, 1, b);
  std::vector<GramSummary> summaries;
  for (int p = 1; p <= p_max; ++p) {
    ASSIGN_OR_RETURN(GramSummary s, CyclicTruncate(gram, p));
    summaries.push_back(std::move(s));
  }

  RenyiCurve curve;
  curve.sigma = sigma;
  curve.entries.resize(alphas.size());
  std::vector<absl::Status> status(alphas.size());
  ParallelFor(static_cast<int>(alphas.size()), [&](int idx) {
    const int alpha = alphas[idx];
    int p = p_max;
    while (p > 1 && (EstimateDpCost(summaries[p - 1], alpha) > options.dp_budget ||
                     PlanDp(summaries[p - 1]).window - 1 > kMaxSuffix)) {
      --p;
    }
    const GramSummary& s = summaries[p - 1];
    auto rho = RenyiRemoveDp(s, sigma, alpha);
    if (!rho.ok()) {
      status[idx] = rho.status();
      return;
    }
    RenyiEntry& e = curve.entries[idx];
    e.alpha = alpha;
    e.rho_remove = *rho;
    e.rho_add = RenyiAddBound(gram, sigma, alpha);
    e.bandwidth = p;
    e.exact = s.tau == 0.0;
  });
  for (const auto& s : status) RETURN_IF_ERROR(s);
  return curve;
}

RenyiDelta DeltaFromCurve(const RenyiCurve& curve, double epsilon) {
  RenyiDelta out;
  for (const RenyiEntry& e : curve.entries) {
    const double dr = RenyiToDelta(e.rho_remove, e.alpha, epsilon);
    const double da = RenyiToDelta(e.rho_add, e.alpha, epsilon);
    const double d = std::max(dr, da);
    if (d < out.delta) {
      out.delta = d;
      out.alpha = e.alpha;
    }
    out.delta_remove = std::min(out.delta_remove, dr);
    out.delta_add = std::min(out.delta_add, da);
  }
  return out;
}

int DefaultBandwidth(const StrategyMatrix& c, const Schedule& schedule,
                     const RenyiOptions& options) {
  const int p = options.bandwidth > 0 ? options.bandwidth
                                      : std::min(c.NaturalBandwidth(), 8);
  return std::clamp(p, 1, schedule.batches());
}

absl::StatusOr<RenyiDelta> RenyiAccount(const StrategyMatrix& c, const Schedule& schedule,
                                        double sigma, double epsilon,
                                        const RenyiOptions& options) {
  ASSIGN_OR_RETURN(MixtureMeans means, ComputeMixtureMeans(c, schedule));
  if (means.IsZero()) {
    RenyiDelta zero;
    zero.delta = zero.delta_remove = zero.delta_add = std::max(0.0, -std::expm1(epsilon));
    return zero;
  }
  ASSIGN_OR_RETURN(RenyiCurve curve,
                   ComputeRenyiCurve(Gram(means), sigma,
                                     DefaultBandwidth(c, schedule, options), options));
  return DeltaFromCurve(curve, epsilon);
}

}  // namespace balloc
