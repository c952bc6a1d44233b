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

#ifndef BALLOC_NUMERICS_H_
#define BALLOC_NUMERICS_H_

#include <limits>
#include <span>
#include <vector>

namespace balloc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)); -inf is the additive identity.
double LogAddExp(double a, double b);
double LogSumExp(std::span<const double> values);

// Standard normal CDF, survival function and quantile.
double NormalCdf(double x);
double NormalSf(double x);
double NormalQuantile(double p);

double Sigmoid(double x);

// log(n!) for n = 0..max_n, via lgamma.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_n);
  double operator()(int n) const { return table_[n]; }
  int max_n() const { return static_cast<int>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

}  // namespace balloc

#endif  // BALLOC_NUMERICS_H_
