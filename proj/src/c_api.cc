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

#include "balloc/balloc.h"

#include <algorithm>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "balloc/calibrate.h"
#include "balloc/errors.h"
#include "balloc/matrix_io.h"
#include "balloc/strategy_matrix.h"

struct balloc_matrix {
  balloc::StrategyMatrix matrix;
};

struct balloc_accountant {
  balloc::Accountant accountant;
};

namespace {

thread_local std::string g_last_error;

balloc_status Fail(balloc_status code, std::string msg) {
  g_last_error = std::move(msg);
  return code;
}

balloc_status FromStatus(const absl::Status& s) {
  if (s.ok()) return BALLOC_OK;
  balloc_status code = BALLOC_ERR_INTERNAL;
  switch (balloc::KindOf(s)) {
    case balloc::ErrorKind::kOk:
      return BALLOC_OK;
    case balloc::ErrorKind::kInvalidArgument:
      code = BALLOC_ERR_INVALID_ARGUMENT;
      break;
    case balloc::ErrorKind::kSingular:
      code = BALLOC_ERR_SINGULAR;
      break;
    case balloc::ErrorKind::kTooLarge:
      code = BALLOC_ERR_TOO_LARGE;
      break;
    case balloc::ErrorKind::kNumerical:
      code = BALLOC_ERR_NUMERICAL;
      break;
    case balloc::ErrorKind::kUnachievable:
      code = BALLOC_ERR_UNACHIEVABLE;
      break;
    case balloc::ErrorKind::kIo:
      code = BALLOC_ERR_IO;
      break;
    case balloc::ErrorKind::kInternal:
      code = BALLOC_ERR_INTERNAL;
      break;
  }
  return Fail(code, std::string(s.message()));
}

template <typename Fn>
balloc_status Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const std::bad_alloc&) {
    return Fail(BALLOC_ERR_TOO_LARGE, "out of memory");
  } catch (const std::exception& e) {
    return Fail(BALLOC_ERR_INTERNAL, e.what());
  }
}

balloc_status WrapMatrix(absl::StatusOr<balloc::StrategyMatrix> m, balloc_matrix** out) {
  if (!m.ok()) return FromStatus(m.status());
  *out = new balloc_matrix{*std::move(m)};
  return BALLOC_OK;
}

balloc::Method ToMethod(balloc_method m) {
  switch (m) {
    case BALLOC_METHOD_CONDCOMP:
      return balloc::Method::kCondComp;
    case BALLOC_METHOD_BEST:
      return balloc::Method::kBest;
    case BALLOC_METHOD_MC:
      return balloc::Method::kMonteCarlo;
    case BALLOC_METHOD_RENYI:
    default:
      return balloc::Method::kRenyi;
  }
}

balloc_method FromMethod(balloc::Method m) {
  switch (m) {
    case balloc::Method::kCondComp:
      return BALLOC_METHOD_CONDCOMP;
    case balloc::Method::kBest:
      return BALLOC_METHOD_BEST;
    case balloc::Method::kMonteCarlo:
      return BALLOC_METHOD_MC;
    case balloc::Method::kRenyi:
    default:
      return BALLOC_METHOD_RENYI;
  }
}

bool ValidMethod(balloc_method m) { return m >= BALLOC_METHOD_RENYI && m <= BALLOC_METHOD_MC; }

balloc_point ToPoint(const balloc::PrivacyPoint& p) {
  balloc_point out;
  out.epsilon = p.epsilon;
  out.delta = p.delta;
  out.delta_remove = p.delta_remove;
  out.delta_add = p.delta_add;
  out.method = FromMethod(p.method);
  out.source = FromMethod(p.source);
  out.alpha = p.alpha;
  out.delta_e = p.delta_e;
  out.ci_low = p.ci_low;
  out.ci_high = p.ci_high;
  return out;
}

}  // namespace

extern "C" {

const char* balloc_status_string(balloc_status status) {
  switch (status) {
    case BALLOC_OK:
      return "ok";
    case BALLOC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case BALLOC_ERR_SINGULAR:
      return "singular matrix";
    case BALLOC_ERR_TOO_LARGE:
      return "problem too large";
    case BALLOC_ERR_NUMERICAL:
      return "numerical error";
    case BALLOC_ERR_UNACHIEVABLE:
      return "unachievable target";
    case BALLOC_ERR_IO:
      return "i/o error";
    case BALLOC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* balloc_last_error(void) { return g_last_error.c_str(); }

const char* balloc_method_name(balloc_method method) {
  return balloc::MethodName(ToMethod(method));
}

const char* balloc_version(void) { return "1.0.0"; }

balloc_status balloc_matrix_identity(int n, balloc_matrix** out) {
  if (out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null output handle");
  return Guard([&] { return WrapMatrix(balloc::BuildIdentity(n), out); });
}

balloc_status balloc_matrix_toeplitz(int n, const double* coeffs, int len,
                                     balloc_matrix** out) {
  if (out == nullptr || coeffs == nullptr || len < 1) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null pointer or empty coefficients");
  }
  return Guard([&] {
    return WrapMatrix(balloc::StrategyMatrix::Toeplitz(n, std::vector<double>(coeffs, coeffs + len)),
                      out);
  });
}

balloc_status balloc_matrix_dense(int n, const double* row_major, balloc_matrix** out) {
  if (out == nullptr || row_major == nullptr || n < 1) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null pointer or non-positive size");
  }
  return Guard([&] {
    const size_t count = static_cast<size_t>(n) * n;
    return WrapMatrix(
        balloc::StrategyMatrix::Dense(n, std::vector<double>(row_major, row_major + count)),
        out);
  });
}

balloc_status balloc_matrix_bsr(int n, int bandwidth, balloc_matrix** out) {
  if (out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null output handle");
  if (bandwidth < 1 || bandwidth > n) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "bandwidth must be in [1, n]");
  }
  return Guard([&] {
    auto c = balloc::SqrtToeplitzCoefficients(bandwidth);
    if (!c.ok()) return FromStatus(c.status());
    return WrapMatrix(balloc::StrategyMatrix::Toeplitz(n, *std::move(c)), out);
  });
}

balloc_status balloc_matrix_bisr(int n, int bandwidth, balloc_matrix** out) {
  if (out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null output handle");
  if (bandwidth < 1 || bandwidth > n) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "bandwidth must be in [1, n]");
  }
  return Guard([&] {
    auto d = balloc::InvSqrtToeplitzCoefficients(bandwidth);
    if (!d.ok()) return FromStatus(d.status());
    return WrapMatrix(balloc::InvertBandedToeplitz(*d, n), out);
  });
}

balloc_status balloc_matrix_invert_banded(int n, const double* d, int len,
                                          balloc_matrix** out) {
  if (out == nullptr || d == nullptr || len < 1) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null pointer or empty coefficients");
  }
  return Guard([&] {
    return WrapMatrix(balloc::InvertBandedToeplitz(std::span<const double>(d, len), n), out);
  });
}

balloc_status balloc_matrix_load(const char* path, balloc_matrix** out) {
  if (out == nullptr || path == nullptr) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] { return WrapMatrix(balloc::LoadMatrix(path), out); });
}

balloc_status balloc_matrix_save(const balloc_matrix* m, const char* path) {
  if (m == nullptr || path == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  return Guard([&] { return FromStatus(balloc::SaveMatrix(m->matrix, path)); });
}

balloc_status balloc_matrix_size(const balloc_matrix* m, int* n) {
  if (m == nullptr || n == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  *n = m->matrix.size();
  return BALLOC_OK;
}

balloc_status balloc_matrix_natural_bandwidth(const balloc_matrix* m, int* band) {
  if (m == nullptr || band == nullptr) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  }
  *band = m->matrix.NaturalBandwidth();
  return BALLOC_OK;
}

void balloc_matrix_free(balloc_matrix* m) { delete m; }

balloc_status balloc_sqrt_toeplitz_coefficients(int length, double* out) {
  if (out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null output");
  auto c = balloc::SqrtToeplitzCoefficients(length);
  if (!c.ok()) return FromStatus(c.status());
  std::copy(c->begin(), c->end(), out);
  return BALLOC_OK;
}

balloc_status balloc_inv_sqrt_toeplitz_coefficients(int length, double* out) {
  if (out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null output");
  auto d = balloc::InvSqrtToeplitzCoefficients(length);
  if (!d.ok()) return FromStatus(d.status());
  std::copy(d->begin(), d->end(), out);
  return BALLOC_OK;
}

void balloc_options_default(balloc_options* options) {
  if (options == nullptr) return;
  const balloc::AccountingOptions d;
  options->alphas = nullptr;
  options->num_alphas = 0;
  options->bandwidth = d.renyi.bandwidth;
  options->dp_budget = d.renyi.dp_budget;
  options->strategy = BALLOC_STRATEGY_HYBRID;
  options->grid_spacing = d.condcomp.grid_spacing;
  options->max_support = d.condcomp.max_support;
  options->delta_e = d.delta_e;
  options->delta_e_fraction = d.delta_e_fraction;
  options->mc_samples = d.mc_samples;
  options->mc_confidence = d.mc_confidence;
  options->has_seed = 0;
  options->seed = 0;
}

balloc_status balloc_accountant_create(const balloc_matrix* m, int epochs, int batches,
                                       const balloc_options* options, balloc_accountant** out) {
  if (m == nullptr || out == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    balloc_options o;
    balloc_options_default(&o);
    if (options != nullptr) o = *options;
    balloc::AccountingOptions opts;
    if (o.alphas != nullptr && o.num_alphas > 0) {
      opts.renyi.alphas.assign(o.alphas, o.alphas + o.num_alphas);
    }
    if (o.bandwidth < 0) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "negative bandwidth");
    opts.renyi.bandwidth = o.bandwidth;
    opts.renyi.dp_budget = o.dp_budget;
    switch (o.strategy) {
      case BALLOC_STRATEGY_HYBRID:
        opts.condcomp.strategy = balloc::AllocationStrategy::kHybrid;
        break;
      case BALLOC_STRATEGY_UNION:
        opts.condcomp.strategy = balloc::AllocationStrategy::kUnion;
        break;
      case BALLOC_STRATEGY_GLOBAL_MAX:
        opts.condcomp.strategy = balloc::AllocationStrategy::kGlobalMax;
        break;
      default:
        return Fail(BALLOC_ERR_INVALID_ARGUMENT, "unknown allocation strategy");
    }
    if (o.grid_spacing < 0) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "negative grid spacing");
    opts.condcomp.grid_spacing = o.grid_spacing;
    opts.condcomp.max_support = o.max_support;
    if (!(o.delta_e > 0 && o.delta_e < 1)) {
      return Fail(BALLOC_ERR_INVALID_ARGUMENT, "delta_e must be in (0, 1)");
    }
    opts.delta_e = o.delta_e;
    opts.delta_e_fraction = o.delta_e_fraction;
    opts.mc_samples = o.mc_samples;
    opts.mc_confidence = o.mc_confidence;
    if (o.has_seed) opts.seed = o.seed;
    auto schedule = balloc::Schedule::Create(epochs, batches);
    if (!schedule.ok()) return FromStatus(schedule.status());
    auto acc = balloc::Accountant::Create(m->matrix, *schedule, std::move(opts));
    if (!acc.ok()) return FromStatus(acc.status());
    *out = new balloc_accountant{*std::move(acc)};
    return BALLOC_OK;
  });
}

balloc_status balloc_accountant_bandwidth(const balloc_accountant* a, int* band) {
  if (a == nullptr || band == nullptr) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  *band = a->accountant.bandwidth();
  return BALLOC_OK;
}

void balloc_accountant_free(balloc_accountant* a) { delete a; }

balloc_status balloc_account(const balloc_accountant* a, balloc_method method, double sigma,
                             double epsilon, balloc_point* out) {
  return balloc_profile(a, method, sigma, &epsilon, 1, out);
}

balloc_status balloc_profile(const balloc_accountant* a, balloc_method method, double sigma,
                             const double* epsilons, int n, balloc_point* out) {
  if (a == nullptr || epsilons == nullptr || out == nullptr || n < 1) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument or empty grid");
  }
  if (!ValidMethod(method)) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "unknown method");
  return Guard([&] {
    auto pts = a->accountant.Profile(ToMethod(method), sigma,
                                     std::span<const double>(epsilons, n));
    if (!pts.ok()) return FromStatus(pts.status());
    for (int i = 0; i < n; ++i) out[i] = ToPoint((*pts)[i]);
    return BALLOC_OK;
  });
}

balloc_status balloc_calibrate(const balloc_accountant* a, balloc_method method,
                               double epsilon, double delta, double tol, double* sigma_out) {
  if (a == nullptr || sigma_out == nullptr) {
    return Fail(BALLOC_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (!ValidMethod(method)) return Fail(BALLOC_ERR_INVALID_ARGUMENT, "unknown method");
  return Guard([&] {
    auto s = a->accountant.Calibrate(ToMethod(method), epsilon, delta, tol);
    if (!s.ok()) return FromStatus(s.status());
    *sigma_out = *s;
    return BALLOC_OK;
  });
}

}  // extern "C"
