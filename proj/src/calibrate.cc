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

#include "balloc/calibrate.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "balloc/errors.h"
#include "balloc/mc_oracle.h"
#include "balloc/status_macros.h"

namespace balloc {

const char* MethodName(Method m) {
  switch (m) {
    case Method::kRenyi:
      return "renyi";
    case Method::kCondComp:
      return "condcomp";
    case Method::kBest:
      return "best";
    case Method::kMonteCarlo:
      return "mc";
  }
  return "unknown";
}

absl::StatusOr<Method> ParseMethod(const std::string& name) {
  if (name == "renyi") return Method::kRenyi;
  if (name == "condcomp") return Method::kCondComp;
  if (name == "best") return Method::kBest;
  if (name == "mc") return Method::kMonteCarlo;
  return absl::InvalidArgumentError("unknown method '" + name + "'");
}

absl::StatusOr<Accountant> Accountant::Create(const StrategyMatrix& c,
                                              const Schedule& schedule,
                                              AccountingOptions options) {
  ASSIGN_OR_RETURN(MixtureMeans means, ComputeMixtureMeans(c, schedule));
  DenseMatrix gram = Gram(means);
  const int p = DefaultBandwidth(c, schedule, options.renyi);
  return Accountant(std::move(means), std::move(gram), p, std::move(options));
}

absl::StatusOr<std::vector<PrivacyPoint>> Accountant::Profile(
    Method method, double sigma, std::span<const double> epsilons) const {
  return ProfileWithDeltaE(method, sigma, epsilons, options_.delta_e);
}

absl::StatusOr<PrivacyPoint> Accountant::Account(Method method, double sigma,
                                                 double epsilon) const {
  const double eps[] = {epsilon};
  ASSIGN_OR_RETURN(std::vector<PrivacyPoint> pts, Profile(method, sigma, eps));
  return pts[0];
}

absl::StatusOr<std::vector<PrivacyPoint>> Accountant::ProfileWithDeltaE(
    Method method, double sigma, std::span<const double> epsilons, double delta_e) const {
  if (epsilons.empty()) return absl::InvalidArgumentError("empty epsilon grid");
  for (size_t i = 0; i < epsilons.size(); ++i) {
    if (std::isnan(epsilons[i])) return absl::InvalidArgumentError("epsilon is NaN");
    if (i > 0 && epsilons[i] < epsilons[i - 1]) {
      return absl::InvalidArgumentError("epsilon grid must be ascending");
    }
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be positive and finite");
  }
  std::vector<PrivacyPoint> out(epsilons.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].epsilon = epsilons[i];
    out[i].method = method;
    out[i].source = method;
  }
  if (means_.IsZero()) {
    for (PrivacyPoint& p : out) {
      p.delta = p.delta_remove = p.delta_add = std::max(0.0, -std::expm1(p.epsilon));
      if (method == Method::kBest) p.source = Method::kRenyi;
    }
    return out;
  }
  switch (method) {
    case Method::kRenyi: {
      ASSIGN_OR_RETURN(RenyiCurve curve,
                       ComputeRenyiCurve(gram_, sigma, bandwidth_, options_.renyi));
      for (PrivacyPoint& p : out) {
        const RenyiDelta d = DeltaFromCurve(curve, p.epsilon);
        p.delta = d.delta;
        p.delta_remove = d.delta_remove;
        p.delta_add = d.delta_add;
        p.alpha = d.alpha;
      }
      break;
    }
    case Method::kCondComp: {
      ASSIGN_OR_RETURN(CondCompAccountant acc,
                       CondCompAccountant::Create(means_, sigma, delta_e, options_.condcomp));
      for (PrivacyPoint& p : out) {
        p.delta = acc.Delta(p.epsilon);
        p.delta_remove = acc.DeltaRemove(p.epsilon);
        p.delta_add = acc.DeltaAdd(p.epsilon);
        p.delta_e = delta_e;
      }
      break;
    }
    case Method::kBest: {
      ASSIGN_OR_RETURN(auto renyi, ProfileWithDeltaE(Method::kRenyi, sigma, epsilons, delta_e));
      ASSIGN_OR_RETURN(auto cc, ProfileWithDeltaE(Method::kCondComp, sigma, epsilons, delta_e));
      for (size_t i = 0; i < out.size(); ++i) {
        out[i] = renyi[i].delta <= cc[i].delta ? renyi[i] : cc[i];
        out[i].method = Method::kBest;
      }
      break;
    }
    case Method::kMonteCarlo: {
      if (!options_.seed.has_value()) {
        return absl::InvalidArgumentError("Monte Carlo accounting requires a seed");
      }
      ASSIGN_OR_RETURN(auto rem, McDeltaProfile(means_, sigma, epsilons, Direction::kRemove,
                                                options_.mc_samples, options_.mc_confidence,
                                                *options_.seed));
      ASSIGN_OR_RETURN(auto add, McDeltaProfile(means_, sigma, epsilons, Direction::kAdd,
                                                options_.mc_samples, options_.mc_confidence,
                                                *options_.seed));
      for (size_t i = 0; i < out.size(); ++i) {
        const MCEstimate& worst =
            rem[i].point_estimate >= add[i].point_estimate ? rem[i] : add[i];
        out[i].delta = worst.point_estimate;
        out[i].delta_remove = rem[i].point_estimate;
        out[i].delta_add = add[i].point_estimate;
        out[i].ci_low = worst.ci_low;
        out[i].ci_high = worst.ci_high;
      }
      return out;
    }
  }
  for (size_t i = 1; i < out.size(); ++i) {
    out[i].delta = std::min(out[i].delta, out[i - 1].delta);
  }
  return out;
}

absl::StatusOr<double> Accountant::Calibrate(Method method, double epsilon,
                                             double delta_target, double tol) const {
  if (!(delta_target > 0 && delta_target < 1)) {
    return absl::InvalidArgumentError("delta target must be in (0, 1)");
  }
  if (!std::isfinite(epsilon)) return absl::InvalidArgumentError("epsilon must be finite");
  if (method == Method::kBest) {
    absl::StatusOr<double> r = Calibrate(Method::kRenyi, epsilon, delta_target, tol);
    absl::StatusOr<double> c = Calibrate(Method::kCondComp, epsilon, delta_target, tol);
    if (r.ok() && c.ok()) return std::min(*r, *c);
    if (r.ok() && KindOf(c.status()) == ErrorKind::kUnachievable) return *r;
    if (c.ok() && KindOf(r.status()) == ErrorKind::kUnachievable) return *c;
    return r.ok() ? c.status() : r.status();
  }
  const double delta_e =
      method == Method::kCondComp ? options_.delta_e_fraction * delta_target : 0.0;
  if (method == Method::kCondComp && !(delta_e > 0 && delta_e < delta_target)) {
    return absl::InvalidArgumentError("delta_E fraction must be in (0, 1)");
  }
  const double eps[] = {epsilon};
  auto ok = [&](double sigma) -> absl::StatusOr<bool> {
    ASSIGN_OR_RETURN(auto pts, ProfileWithDeltaE(method, sigma, eps, delta_e));
    return pts[0].delta <= delta_target;
  };
  return BisectSigma(ok, tol);
}

}  // namespace balloc
