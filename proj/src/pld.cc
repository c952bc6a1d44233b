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

#include "balloc/pld.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "balloc/errors.h"
#include "balloc/numerics.h"
#include "balloc/parallel.h"
#include "balloc/status_macros.h"
#include "fftw3.h"

namespace balloc {
namespace {

constexpr int64_t kMaxGridPoints = 50'000'000;

std::mutex& FftwPlannerMutex() {
  static std::mutex mu;
  return mu;
}

size_t NiceFftSize(size_t n) {
  size_t best = 1;
  while (best < n) best <<= 1;
  for (size_t p3 = 1; p3 < best; p3 *= 3) {
    for (size_t p5 = p3; p5 < best; p5 *= 5) {
      size_t v = p5;
      while (v < n) v <<= 1;
      best = std::min(best, v);
    }
  }
  return best;
}

// Moves tails of mass <= trim: the upper one to +inf, the lower one onto the
// first kept point.
void Trim(std::vector<double>& pmf, int64_t& offset, double& inf_mass, double trim) {
  if (pmf.empty()) return;
  double acc = 0.0;
  size_t end = pmf.size();
  while (end > 1 && acc + pmf[end - 1] <= trim) acc += pmf[--end];
  inf_mass += acc;
  pmf.resize(end);
  acc = 0.0;
  size_t begin = 0;
  while (begin + 1 < pmf.size() && acc + pmf[begin] <= trim) acc += pmf[begin++];
  if (begin > 0) {
    pmf[begin] += acc;
    pmf.erase(pmf.begin(), pmf.begin() + begin);
    offset += static_cast<int64_t>(begin);
  }
}

}  // namespace

const char* DirectionName(Direction d) {
  return d == Direction::kRemove ? "remove" : "add";
}

MixGaussPair::MixGaussPair(std::vector<double> means, std::vector<double> weights,
                           double sigma, Direction direction)
    : means_(std::move(means)),
      weights_(std::move(weights)),
      sigma_(sigma),
      direction_(direction) {
  log_weights_.resize(weights_.size());
  for (size_t i = 0; i < weights_.size(); ++i) log_weights_[i] = std::log(weights_[i]);
}

absl::StatusOr<MixGaussPair> MixGaussPair::Create(std::vector<double> means,
                                                  std::vector<double> weights,
                                                  double sigma, Direction direction) {
  if (means.empty() || means.size() != weights.size()) {
    return absl::InvalidArgumentError("means and weights must be non-empty and aligned");
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be positive and finite");
  }
  double total = 0.0;
  for (size_t i = 0; i < means.size(); ++i) {
    if (!(means[i] >= 0) || !std::isfinite(means[i])) {
      return absl::InvalidArgumentError("mixture means must be finite and non-negative");
    }
    if (!(weights[i] >= 0) || !std::isfinite(weights[i])) {
      return absl::InvalidArgumentError("weights must be finite and non-negative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrFormat("weights sum to %.12g, expected 1", total));
  }
  std::vector<size_t> order(means.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return means[a] < means[b]; });
  std::vector<double> m, w;
  for (size_t idx : order) {
    if (weights[idx] == 0.0) continue;
    if (!m.empty() && m.back() == means[idx]) {
      w.back() += weights[idx];
    } else {
      m.push_back(means[idx]);
      w.push_back(weights[idx]);
    }
  }
  for (double& v : w) v /= total;
  return MixGaussPair(std::move(m), std::move(w), sigma, direction);
}

double MixGaussPair::LossAndSlope(double y, double* slope) const {
  const double inv = 1.0 / (2.0 * sigma_ * sigma_);
  double mx = kNegInf;
  for (size_t i = 0; i < means_.size(); ++i) {
    mx = std::max(mx, log_weights_[i] + (2.0 * means_[i] * y - means_[i] * means_[i]) * inv);
  }
  double s = 0.0, sm = 0.0;
  for (size_t i = 0; i < means_.size(); ++i) {
    const double e = std::exp(
        log_weights_[i] + (2.0 * means_[i] * y - means_[i] * means_[i]) * inv - mx);
    s += e;
    sm += e * means_[i];
  }
  if (slope != nullptr) *slope = sm / s / (sigma_ * sigma_);
  return mx + std::log(s);
}

double MixGaussPair::Loss(double y) const { return LossAndSlope(y, nullptr); }

double MixGaussPair::LossInfimum() const {
  return means_[0] == 0.0 ? log_weights_[0] : kNegInf;
}

double MixGaussPair::SolveLoss(double target) const {
  const double s2 = sigma_ * sigma_;
  const double m_top = means_.back();
  // L(y) >= log w_top + (2 m_top y - m_top^2) / (2 sigma^2).
  double hi = s2 * (target - log_weights_.back()) / m_top + 0.5 * m_top + sigma_;
  double lo = hi - sigma_;
  double step = sigma_;
  while (Loss(lo) > target) {
    lo -= step;
    step *= 2.0;
  }
  double y = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    double slope;
    const double f = LossAndSlope(y, &slope) - target;
    if (f > 0) {
      hi = y;
    } else {
      lo = y;
    }
    const double tol = std::max(1e-13 * sigma_, 4e-16 * std::abs(y));
    if (f == 0.0 || hi - lo <= tol) break;
    double next = y - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 0.25 * tol) {
      y = next;
      break;
    }
    y = next;
  }
  return y;
}

double HockeyStick(const MixGaussPair& pair, double epsilon) {
  if (epsilon == kInf) return 0.0;
  if (pair.IsDegenerate()) return std::max(0.0, -std::expm1(epsilon));
  const double sigma = pair.sigma();
  const auto m = pair.means();
  const auto w = pair.weights();
  double delta;
  if (pair.direction() == Direction::kRemove) {
    if (epsilon <= pair.LossInfimum()) return std::max(0.0, -std::expm1(epsilon));
    const double y = pair.SolveLoss(epsilon);
    double p_tail = 0.0;
    for (size_t i = 0; i < m.size(); ++i) p_tail += w[i] * NormalSf((y - m[i]) / sigma);
    delta = p_tail - std::exp(epsilon) * NormalSf(y / sigma);
  } else {
    if (-epsilon <= pair.LossInfimum()) return 0.0;
    const double y = pair.SolveLoss(-epsilon);
    double q_tail = 0.0;
    for (size_t i = 0; i < m.size(); ++i) q_tail += w[i] * NormalCdf((y - m[i]) / sigma);
    delta = NormalCdf(y / sigma) - std::exp(epsilon) * q_tail;
  }
  return std::clamp(delta, 0.0, 1.0);
}

DiscretePLD::DiscretePLD(double h, int64_t offset, std::vector<double> pmf,
                         double infinity_mass)
    : h_(h), offset_(offset), pmf_(std::move(pmf)), infinity_mass_(infinity_mass) {}

DiscretePLD DiscretePLD::PointMassAtZero(double h) { return DiscretePLD(h, 0, {1.0}, 0.0); }

double DiscretePLD::TotalMass() const {
  return std::accumulate(pmf_.begin(), pmf_.end(), 0.0) + infinity_mass_;
}

double DiscretePLD::DeltaAt(double epsilon) const {
  if (epsilon == kNegInf) return std::min(1.0, TotalMass());
  double delta = infinity_mass_;
  for (size_t j = pmf_.size(); j-- > 0;) {
    const double loss = static_cast<double>(offset_ + static_cast<int64_t>(j)) * h_;
    if (loss <= epsilon) break;
    delta += pmf_[j] * -std::expm1(epsilon - loss);
  }
  return std::clamp(delta, 0.0, 1.0);
}

void DiscretePLD::WriteCsv(std::ostream& out) const {
  out << absl::StrFormat("# h=%.17g origin=%d infinity_mass=%.17g\n", h_, origin(),
                         infinity_mass_);
  out << "grid_index,loss,mass\n";
  for (size_t j = 0; j < pmf_.size(); ++j) {
    const int64_t idx = offset_ + static_cast<int64_t>(j);
    out << absl::StrFormat("%d,%.17g,%.17g\n", idx, static_cast<double>(idx) * h_, pmf_[j]);
  }
}

std::pair<double, double> LossRange(const MixGaussPair& pair,
                                    const DiscretizeOptions& options) {
  if (pair.IsDegenerate()) return {0.0, 0.0};
  const double sigma = pair.sigma();
  const double z = NormalQuantile(options.tail_mass);  // negative
  double lo, hi;
  if (pair.direction() == Direction::kRemove) {
    lo = pair.Loss(pair.means().front() + sigma * z);
    hi = pair.Loss(pair.means().back() - sigma * z);
  } else {
    lo = -pair.Loss(-sigma * z);
    hi = -pair.Loss(sigma * z);
  }
  lo = std::max(lo, options.loss_floor);
  hi = std::max(hi, lo);
  return {lo, hi};
}

int64_t GridPointCount(const MixGaussPair& pair, double h, const DiscretizeOptions& options) {
  if (pair.IsDegenerate()) return 1;
  const auto [lo, hi] = LossRange(pair, options);
  const int64_t j_lo = static_cast<int64_t>(std::floor(lo / h));
  const int64_t j_hi = std::max(static_cast<int64_t>(std::ceil(hi / h)), j_lo + 1);
  return j_hi - j_lo + 1;
}

absl::StatusOr<DiscretePLD> Discretize(const MixGaussPair& pair, double h,
                                       const DiscretizeOptions& options) {
  if (!(h > 0) || !std::isfinite(h)) {
    return absl::InvalidArgumentError("grid spacing must be positive");
  }
  if (pair.IsDegenerate()) return DiscretePLD::PointMassAtZero(h);
  const auto [lo, hi] = LossRange(pair, options);
  const double lo_idx = std::floor(lo / h);
  const double hi_idx = std::ceil(hi / h);
  if (hi_idx - lo_idx + 1 > kMaxGridPoints) {
    return TooLargeError(absl::StrFormat(
        "grid spacing %g needs %g points; increase h", h, hi_idx - lo_idx + 1));
  }
  const int64_t j_lo = static_cast<int64_t>(lo_idx);
  const int64_t j_hi = std::max(static_cast<int64_t>(hi_idx), j_lo + 1);
  const int64_t n = j_hi - j_lo + 1;

  std::vector<double> delta(n);
  const int64_t chunk = 4096;
  const int chunks = static_cast<int>((n + chunk - 1) / chunk);
  ParallelFor(chunks, [&](int c) {
    const int64_t end = std::min(n, (c + 1) * chunk);
    for (int64_t j = c * chunk; j < end; ++j) {
      delta[j] = HockeyStick(pair, static_cast<double>(j_lo + j) * h);
    }
  });
  // Enforce the monotonicity the exact curve has, guarding against rounding.
  for (int64_t j = 1; j < n; ++j) delta[j] = std::min(delta[j], delta[j - 1]);

  const double down = -std::expm1(-h);  // 1 - e^{-h}
  const double up = std::expm1(h);      // e^h - 1
  std::vector<double> pmf(n);
  double total = delta[n - 1];
  for (int64_t j = 0; j < n; ++j) {
    const double left = j == 0 ? 1.0 - delta[0] : (delta[j - 1] - delta[j]) / down;
    const double right = j + 1 < n ? (delta[j] - delta[j + 1]) / up : 0.0;
    pmf[j] = std::max(0.0, left - right);
    total += pmf[j];
  }
  pmf[0] = std::max(0.0, pmf[0] + (1.0 - total));
  return DiscretePLD(h, j_lo, std::move(pmf), delta[n - 1]);
}

absl::StatusOr<double> AutoGridSpacing(std::span<const MixGaussPair* const> pairs,
                                       int max_support, const DiscretizeOptions& options) {
  if (max_support < 16) return absl::InvalidArgumentError("max_support too small");
  double widest = 0.0;
  for (const MixGaussPair* p : pairs) {
    const auto [lo, hi] = LossRange(*p, options);
    widest = std::max(widest, hi - lo);
  }
  if (widest <= 0.0) return 1e-3;
  auto max_count = [&](double h) {
    int64_t c = 0;
    for (const MixGaussPair* p : pairs) c = std::max(c, GridPointCount(*p, h, options));
    return c;
  };
  double lo_h = widest / (max_support + 8);
  double hi_h = widest / (max_support - 8);
  while (max_count(hi_h) > max_support) hi_h *= 1.01;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo_h + hi_h);
    if (max_count(mid) > max_support) {
      lo_h = mid;
    } else {
      hi_h = mid;
    }
  }
  return hi_h;
}

std::vector<double> ConvolveDirect(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> ConvolveFft(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const size_t out_n = a.size() + b.size() - 1;
  const size_t n = NiceFftSize(out_n);
  const size_t nc = n / 2 + 1;
  double* ra = fftw_alloc_real(n);
  double* rb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(nc);
  fftw_complex* cb = fftw_alloc_complex(nc);
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + n, 0.0);
  std::fill(rb, rb + n, 0.0);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);
  fftw_execute(pa);
  fftw_execute(pb);
  for (size_t k = 0; k < nc; ++k) {
    const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
    const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
    ca[k][0] = re;
    ca[k][1] = im;
  }
  fftw_execute(pinv);
  std::vector<double> out(out_n);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < out_n; ++i) out[i] = std::max(0.0, ra[i] * scale);
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

absl::StatusOr<DiscretePLD> Compose(const DiscretePLD& a, const DiscretePLD& b,
                                    const ComposeOptions& options) {
  const double h = a.grid_spacing();
  if (std::abs(h - b.grid_spacing()) > 1e-12 * h) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "grid spacing mismatch: %.17g vs %.17g", h, b.grid_spacing()));
  }
  const size_t combined = a.pmf().size() + b.pmf().size();
  std::vector<double> pmf = combined < static_cast<size_t>(options.direct_limit)
                                ? ConvolveDirect(a.pmf(), b.pmf())
                                : ConvolveFft(a.pmf(), b.pmf());
  int64_t offset = a.offset() + b.offset();
  double inf = a.infinity_mass() + b.infinity_mass() - a.infinity_mass() * b.infinity_mass();
  Trim(pmf, offset, inf, options.trim_mass);
  return DiscretePLD(h, offset, std::move(pmf), inf);
}

absl::StatusOr<DiscretePLD> SelfCompose(const DiscretePLD& a, int64_t times,
                                        const ComposeOptions& options) {
  if (times < 0) return absl::InvalidArgumentError("negative composition count");
  DiscretePLD result = DiscretePLD::PointMassAtZero(a.grid_spacing());
  if (times == 0) return result;
  bool have = false;
  DiscretePLD base = a;
  while (times > 0) {
    if (times & 1) {
      if (have) {
        ASSIGN_OR_RETURN(result, Compose(result, base, options));
      } else {
        result = base;
        have = true;
      }
    }
    times >>= 1;
    if (times > 0) {
      ASSIGN_OR_RETURN(base, Compose(base, base, options));
    }
  }
  return result;
}

absl::StatusOr<DiscretePLD> ComposeAll(std::vector<DiscretePLD> plds,
                                       const ComposeOptions& options) {
  if (plds.empty()) return absl::InvalidArgumentError("nothing to compose");
  while (plds.size() > 1) {
    std::vector<DiscretePLD> next;
    next.reserve((plds.size() + 1) / 2);
    for (size_t i = 0; i + 1 < plds.size(); i += 2) {
      ASSIGN_OR_RETURN(DiscretePLD c, Compose(plds[i], plds[i + 1], options));
      next.push_back(std::move(c));
    }
    if (plds.size() % 2 == 1) next.push_back(std::move(plds.back()));
    plds = std::move(next);
  }
  return std::move(plds[0]);
}

}  // namespace balloc
