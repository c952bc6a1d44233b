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

// balloc command-line tool. Talks to the library only through balloc.h.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "balloc/balloc.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError {
  std::string message;
};

struct LibraryError {
  balloc_status status;
  std::string message;
};

void Check(balloc_status s) {
  if (s == BALLOC_OK) return;
  throw LibraryError{s, std::string(balloc_status_string(s)) + ": " + balloc_last_error()};
}

// Floats are reported with 12 significant digits.
double Round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string Fmt12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<double> ParseList(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw UsageError{std::string("bad number '") + item + "' in " + what};
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError{std::string("empty ") + what};
  return out;
}

struct MatrixDeleter {
  void operator()(balloc_matrix* m) const { balloc_matrix_free(m); }
};
struct AccountantDeleter {
  void operator()(balloc_accountant* a) const { balloc_accountant_free(a); }
};
using MatrixPtr = std::unique_ptr<balloc_matrix, MatrixDeleter>;
using AccountantPtr = std::unique_ptr<balloc_accountant, AccountantDeleter>;

// Flags shared by the accounting commands.
struct AccountingFlags {
  std::string matrix;
  int epochs = 0;
  int batches = 0;
  std::string method = "best";
  int alpha_max = 64;
  int bandwidth = 0;
  double dp_budget = 0;
  std::string strategy = "hybrid";
  double grid_spacing = 0;
  double delta_e = 0;
  double delta_e_fraction = 0;
  long long samples = 0;
  double confidence = 0;
  std::optional<unsigned long long> seed;
};

void AddAccountingFlags(CLI::App* cmd, AccountingFlags& f, bool with_method) {
  cmd->add_option("--matrix", f.matrix, "Strategy matrix file")->required();
  cmd->add_option("--epochs", f.epochs, "Epochs k")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--batches", f.batches, "Batches per epoch b")
      ->required()
      ->check(CLI::PositiveNumber);
  if (with_method) {
    cmd->add_option("--method", f.method, "renyi | condcomp | best | mc")
        ->check(CLI::IsMember({"renyi", "condcomp", "best", "mc"}));
  }
  cmd->add_option("--alpha-max", f.alpha_max, "Largest Renyi order (orders 2..A)")
      ->check(CLI::Range(2, 255));
  cmd->add_option("--bandwidth", f.bandwidth, "Renyi cyclic bandwidth (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--dp-budget", f.dp_budget, "Per-order DP transition budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--strategy", f.strategy, "hybrid | union | global-max")
      ->check(CLI::IsMember({"hybrid", "union", "global-max"}));
  cmd->add_option("--grid-spacing", f.grid_spacing, "PLD grid spacing (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta-e", f.delta_e, "condcomp bad-event budget at fixed sigma")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--delta-e-fraction", f.delta_e_fraction,
                  "Share of the delta target given to delta_E when calibrating")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--samples", f.samples, "Monte Carlo samples")->check(CLI::Range(1000LL, 1LL << 40));
  cmd->add_option("--confidence", f.confidence, "Monte Carlo confidence level")
      ->check(CLI::Range(0.5, 0.999999));
  cmd->add_option("--seed", f.seed, "Monte Carlo seed");
}

balloc_method MethodOf(const std::string& name) {
  if (name == "renyi") return BALLOC_METHOD_RENYI;
  if (name == "condcomp") return BALLOC_METHOD_CONDCOMP;
  if (name == "mc") return BALLOC_METHOD_MC;
  return BALLOC_METHOD_BEST;
}

balloc_strategy StrategyOf(const std::string& name) {
  if (name == "union") return BALLOC_STRATEGY_UNION;
  if (name == "global-max") return BALLOC_STRATEGY_GLOBAL_MAX;
  return BALLOC_STRATEGY_HYBRID;
}

struct Session {
  MatrixPtr matrix;
  AccountantPtr accountant;
  std::vector<int> alphas;
  balloc_options options;
};

// Loads the matrix and builds the accountant. Size mismatches are usage errors.
std::unique_ptr<Session> Open(const AccountingFlags& f) {
  auto s = std::make_unique<Session>();
  balloc_matrix* m = nullptr;
  Check(balloc_matrix_load(f.matrix.c_str(), &m));
  s->matrix.reset(m);
  int n = 0;
  Check(balloc_matrix_size(m, &n));
  if (static_cast<long long>(f.epochs) * f.batches != n) {
    throw UsageError{"matrix size " + std::to_string(n) + " != epochs * batches = " +
                     std::to_string(static_cast<long long>(f.epochs) * f.batches)};
  }
  balloc_options_default(&s->options);
  for (int a = 2; a <= f.alpha_max; ++a) s->alphas.push_back(a);
  s->options.alphas = s->alphas.data();
  s->options.num_alphas = static_cast<int>(s->alphas.size());
  s->options.bandwidth = f.bandwidth;
  if (f.dp_budget > 0) s->options.dp_budget = f.dp_budget;
  s->options.strategy = StrategyOf(f.strategy);
  s->options.grid_spacing = f.grid_spacing;
  if (f.delta_e > 0) s->options.delta_e = f.delta_e;
  if (f.delta_e_fraction > 0) s->options.delta_e_fraction = f.delta_e_fraction;
  if (f.samples > 0) s->options.mc_samples = f.samples;
  if (f.confidence > 0) s->options.mc_confidence = f.confidence;
  if (f.seed) {
    s->options.has_seed = 1;
    s->options.seed = *f.seed;
  }
  balloc_accountant* a = nullptr;
  Check(balloc_accountant_create(m, f.epochs, f.batches, &s->options, &a));
  s->accountant.reset(a);
  return s;
}

void RequireSeedFor(const AccountingFlags& f, bool needs_mc) {
  if (needs_mc && !f.seed) throw UsageError{"--seed is required for Monte Carlo accounting"};
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) throw LibraryError{BALLOC_ERR_IO, "cannot write " + path};
}

Json PointJson(const AccountingFlags& f, const balloc_point& p, double sigma) {
  Json j;
  j["schema"] = 1;
  j["method"] = balloc_method_name(p.method);
  j["source"] = balloc_method_name(p.source);
  j["epsilon"] = Round12(p.epsilon);
  j["sigma"] = Round12(sigma);
  j["delta"] = Round12(p.delta);
  j["direction_breakdown"] = {{"remove", Round12(p.delta_remove)},
                              {"add", Round12(p.delta_add)}};
  if (p.source == BALLOC_METHOD_RENYI) j["alpha"] = p.alpha;
  if (p.source == BALLOC_METHOD_CONDCOMP) {
    j["delta_e"] = Round12(p.delta_e);
    j["strategy"] = f.strategy;
    j["as_published"] = f.strategy == "global-max";
  }
  if (p.method == BALLOC_METHOD_MC) {
    j["ci_low"] = Round12(p.ci_low);
    j["ci_high"] = Round12(p.ci_high);
    j["seed"] = *f.seed;
    j["samples"] = f.samples > 0 ? f.samples : 1000000LL;
  }
  return j;
}

// ---- gen-matrix ----

struct GenFlags {
  std::string kind;
  int n = 0;
  int bandwidth = 0;
  std::string coeffs;
  std::string input;
  std::string out;
};

// Plain CSV rows (no header) as a dense matrix, or a file already in the
// native format.
MatrixPtr ImportMatrix(const std::string& path, int expect_n) {
  std::ifstream in(path);
  if (!in) throw LibraryError{BALLOC_ERR_IO, "cannot open " + path};
  std::string first;
  std::getline(in, first);
  balloc_matrix* m = nullptr;
  if (first.rfind("# balloc-matrix", 0) == 0) {
    Check(balloc_matrix_load(path.c_str(), &m));
  } else {
    std::vector<std::vector<double>> rows;
    std::string line = first;
    do {
      if (line.empty() || line[0] == '#') continue;
      rows.push_back(ParseList(line, "matrix row"));
    } while (std::getline(in, line));
    const int n = static_cast<int>(rows.size());
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != n) throw UsageError{"imported matrix is not square"};
      flat.insert(flat.end(), r.begin(), r.end());
    }
    if (n == 0) throw UsageError{"imported matrix is empty"};
    Check(balloc_matrix_dense(n, flat.data(), &m));
  }
  MatrixPtr out(m);
  int n = 0;
  Check(balloc_matrix_size(m, &n));
  if (expect_n > 0 && n != expect_n) {
    throw UsageError{"imported matrix has size " + std::to_string(n)};
  }
  return out;
}

int RunGenMatrix(const GenFlags& f) {
  balloc_matrix* m = nullptr;
  MatrixPtr holder;
  const bool needs_n = f.kind != "import";
  if (needs_n && f.n < 1) throw UsageError{"--n must be a positive integer"};
  if (f.kind == "identity") {
    Check(balloc_matrix_identity(f.n, &m));
  } else if (f.kind == "bsr" || f.kind == "bisr") {
    if (f.bandwidth < 1 || f.bandwidth > f.n) {
      throw UsageError{"--bandwidth must be in [1, n] for kind " + f.kind};
    }
    Check(f.kind == "bsr" ? balloc_matrix_bsr(f.n, f.bandwidth, &m)
                          : balloc_matrix_bisr(f.n, f.bandwidth, &m));
  } else if (f.kind == "toeplitz") {
    if (f.coeffs.empty()) throw UsageError{"--coeffs is required for kind toeplitz"};
    std::vector<double> c = ParseList(f.coeffs, "--coeffs");
    if (static_cast<int>(c.size()) > f.n) throw UsageError{"more coefficients than --n"};
    if (f.bandwidth > 0 && static_cast<int>(c.size()) > f.bandwidth) {
      c.resize(f.bandwidth);
    }
    Check(balloc_matrix_toeplitz(f.n, c.data(), static_cast<int>(c.size()), &m));
  } else if (f.kind == "import") {
    if (f.input.empty()) throw UsageError{"--input is required for kind import"};
    holder = ImportMatrix(f.input, f.n);
  } else {
    throw UsageError{"unknown kind '" + f.kind + "'"};
  }
  if (m != nullptr) holder.reset(m);
  Check(balloc_matrix_save(holder.get(), f.out.c_str()));
  return kExitOk;
}

// ---- account / profile / calibrate / compare ----

int RunAccount(const AccountingFlags& f, double sigma, double epsilon) {
  RequireSeedFor(f, f.method == "mc");
  auto s = Open(f);
  balloc_point p;
  Check(balloc_account(s->accountant.get(), MethodOf(f.method), sigma, epsilon, &p));
  std::cout << PointJson(f, p, sigma).dump(2) << "\n";
  return kExitOk;
}

int RunProfile(const AccountingFlags& f, double sigma, const std::string& grid,
               const std::string& out) {
  RequireSeedFor(f, f.method == "mc");
  std::vector<double> eps = ParseList(grid, "--epsilons");
  for (size_t i = 1; i < eps.size(); ++i) {
    if (eps[i] < eps[i - 1]) throw UsageError{"--epsilons must be ascending"};
  }
  auto s = Open(f);
  std::vector<balloc_point> pts(eps.size());
  Check(balloc_profile(s->accountant.get(), MethodOf(f.method), sigma, eps.data(),
                       static_cast<int>(eps.size()), pts.data()));
  std::ostringstream csv;
  const bool mc = f.method == "mc";
  csv << "epsilon,delta,delta_remove,delta_add" << (mc ? ",ci_low,ci_high" : "") << "\n";
  for (const balloc_point& p : pts) {
    csv << Fmt12(p.epsilon) << "," << Fmt12(p.delta) << "," << Fmt12(p.delta_remove) << ","
        << Fmt12(p.delta_add);
    if (mc) csv << "," << Fmt12(p.ci_low) << "," << Fmt12(p.ci_high);
    csv << "\n";
  }
  WriteOutput(out, csv.str());
  return kExitOk;
}

int RunCalibrate(const AccountingFlags& f, double epsilon, double delta, double tol) {
  RequireSeedFor(f, f.method == "mc");
  auto s = Open(f);
  double sigma = 0;
  Check(balloc_calibrate(s->accountant.get(), MethodOf(f.method), epsilon, delta, tol, &sigma));
  Json j;
  j["schema"] = 1;
  j["method"] = f.method;
  j["epsilon"] = Round12(epsilon);
  j["delta"] = Round12(delta);
  j["sigma"] = Round12(sigma);
  if (f.method == "condcomp" || f.method == "best") {
    j["strategy"] = f.strategy;
    j["as_published"] = f.strategy == "global-max";
  }
  if (f.method == "mc") j["seed"] = *f.seed;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int RunCompare(const AccountingFlags& f, double delta, const std::string& grid, double tol,
               const std::string& out) {
  RequireSeedFor(f, true);
  std::vector<double> eps = ParseList(grid, "--epsilons");
  auto s = Open(f);
  auto calibrate = [&](balloc_method m, double e) {
    double sigma = NAN;
    const balloc_status st = balloc_calibrate(s->accountant.get(), m, e, delta, tol, &sigma);
    if (st == BALLOC_ERR_UNACHIEVABLE) return static_cast<double>(NAN);
    Check(st);
    return sigma;
  };
  std::ostringstream csv;
  csv << "epsilon,sigma_renyi,sigma_condcomp,sigma_mc_reference\n";
  for (double e : eps) {
    csv << Fmt12(e) << "," << Fmt12(calibrate(BALLOC_METHOD_RENYI, e)) << ","
        << Fmt12(calibrate(BALLOC_METHOD_CONDCOMP, e)) << ","
        << Fmt12(calibrate(BALLOC_METHOD_MC, e)) << "\n";
  }
  WriteOutput(out, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balloc: privacy accounting for matrix mechanisms under balls-in-bins batching"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(balloc_version()));

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-matrix", "Write a strategy matrix file");
  gen_cmd->add_option("--kind", gen.kind, "identity | bsr | bisr | toeplitz | import")
      ->required();
  gen_cmd->add_option("--n", gen.n, "Matrix size N");
  gen_cmd->add_option("--bandwidth", gen.bandwidth, "Band width P");
  gen_cmd->add_option("--coeffs", gen.coeffs, "Toeplitz coefficients c0,c1,...");
  gen_cmd->add_option("--input", gen.input, "File to import (CSV rows or native format)");
  gen_cmd->add_option("--out", gen.out, "Output path")->required();

  AccountingFlags acc;
  double acc_sigma = 0, acc_eps = 0;
  auto* acc_cmd = app.add_subcommand("account", "delta at one (sigma, epsilon) as JSON");
  AddAccountingFlags(acc_cmd, acc, true);
  acc_cmd->add_option("--sigma", acc_sigma, "Noise multiplier")->required()->check(
      CLI::PositiveNumber);
  acc_cmd->add_option("--epsilon", acc_eps, "Epsilon")->required();

  AccountingFlags prof;
  double prof_sigma = 0;
  std::string prof_grid = "0.25,0.5,1,2,4,8", prof_out;
  auto* prof_cmd = app.add_subcommand("profile", "Privacy profile as CSV (epsilon, delta)");
  AddAccountingFlags(prof_cmd, prof, true);
  prof_cmd->add_option("--sigma", prof_sigma, "Noise multiplier")->required()->check(
      CLI::PositiveNumber);
  prof_cmd->add_option("--epsilons", prof_grid, "Ascending epsilon grid");
  prof_cmd->add_option("--out", prof_out, "CSV path (default stdout)");

  AccountingFlags cal;
  double cal_eps = 0, cal_delta = 0, cal_tol = 1e-3;
  auto* cal_cmd = app.add_subcommand("calibrate", "Smallest sigma meeting (epsilon, delta)");
  AddAccountingFlags(cal_cmd, cal, true);
  cal_cmd->add_option("--epsilon", cal_eps, "Epsilon")->required();
  cal_cmd->add_option("--delta", cal_delta, "Delta target")->required()->check(
      CLI::Range(0.0, 1.0));
  cal_cmd->add_option("--tol", cal_tol, "Relative sigma tolerance")->check(
      CLI::Range(1e-9, 0.5));

  AccountingFlags cmp;
  double cmp_delta = 1e-5, cmp_tol = 1e-3;
  std::string cmp_grid = "0.25,0.5,1,2,4,8", cmp_out;
  auto* cmp_cmd = app.add_subcommand(
      "compare", "Calibrated sigma per method over an epsilon grid as CSV");
  AddAccountingFlags(cmp_cmd, cmp, false);
  cmp_cmd->add_option("--delta", cmp_delta, "Delta target")->check(CLI::Range(0.0, 1.0));
  cmp_cmd->add_option("--epsilons", cmp_grid, "Epsilon grid");
  cmp_cmd->add_option("--tol", cmp_tol, "Relative sigma tolerance")->check(
      CLI::Range(1e-9, 0.5));
  cmp_cmd->add_option("--out", cmp_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return RunGenMatrix(gen);
    if (*acc_cmd) return RunAccount(acc, acc_sigma, acc_eps);
    if (*prof_cmd) return RunProfile(prof, prof_sigma, prof_grid, prof_out);
    if (*cal_cmd) return RunCalibrate(cal, cal_eps, cal_delta, cal_tol);
    if (*cmp_cmd) return RunCompare(cmp, cmp_delta, cmp_grid, cmp_tol, cmp_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitUsage;
  } catch (const LibraryError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.status == BALLOC_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  }
  return kExitUsage;
}
