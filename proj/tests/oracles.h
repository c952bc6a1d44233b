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

// Independent reference computations used by the tests. Nothing here calls
// into the library.
#ifndef BALLOC_TESTS_ORACLES_H_
#define BALLOC_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <vector>

namespace balloc::oracle {

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// delta(eps) of N(mu, 1) vs N(0, 1).
inline double GaussianDelta(double mu, double eps) {
  return Phi(-eps / mu + mu / 2) - std::exp(eps) * Phi(-eps / mu - mu / 2);
}

// Order-alpha moment of the remove pair via the multinomial expansion over
// count vectors:
//   b^-alpha sum_n multinom(alpha; n) exp((n'Gn - sum n_i G_ii) / (2 sigma^2)),
// returned as the Renyi divergence.
inline double RenyiRemoveMultinomial(const std::vector<std::vector<double>>& g, double sigma,
                                     int alpha) {
  const int b = static_cast<int>(g.size());
  std::vector<int> n(b, 0);
  std::vector<double> terms;
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == b - 1) {
      n[idx] = left;
      double log_coef = std::lgamma(alpha + 1.0);
      double quad = 0;
      for (int i = 0; i < b; ++i) {
        log_coef -= std::lgamma(n[i] + 1.0);
        for (int j = 0; j < b; ++j) quad += n[i] * n[j] * g[i][j];
        quad -= n[i] * g[i][i];
      }
      terms.push_back(log_coef + quad / (2 * sigma * sigma));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      n[idx] = c;
      rec(idx + 1, left - c);
    }
  };
  rec(0, alpha);
  double mx = -INFINITY;
  for (double t : terms) mx = std::max(mx, t);
  double s = 0;
  for (double t : terms) s += std::exp(t - mx);
  const double log_moment = mx + std::log(s) - alpha * std::log(static_cast<double>(b));
  return log_moment / (alpha - 1);
}

// Simpson's rule on [lo, hi] with n (even) panels.
inline double Simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

inline double NormalPdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * M_PI));
}

// Hockey-stick divergence H_{e^eps}(P || Q) by quadrature of max(p - e^eps q, 0).
inline double HockeyStickQuadrature(const std::function<double(double)>& p,
                                    const std::function<double(double)>& q, double eps,
                                    double lo, double hi) {
  const double g = std::exp(eps);
  auto f = [&](double x) { return p(x) - g * q(x); };
  // Split at sign changes so each Simpson panel integrates a smooth piece.
  std::vector<double> cuts{lo};
  const int scan = 20000;
  for (int i = 0; i < scan; ++i) {
    double a = lo + (hi - lo) * i / scan, b = lo + (hi - lo) * (i + 1) / scan;
    if ((f(a) > 0) == (f(b) > 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      ((f(m) > 0) == (f(a) > 0) ? a : b) = m;
    }
    cuts.push_back(0.5 * (a + b));
  }
  cuts.push_back(hi);
  double total = 0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    if (f(mid) <= 0) continue;
    total += Simpson(f, cuts[k], cuts[k + 1], 200000);
  }
  return total;
}

}  // namespace balloc::oracle

#endif  // BALLOC_TESTS_ORACLES_H_
