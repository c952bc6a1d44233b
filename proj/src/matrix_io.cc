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

#include "balloc/matrix_io.h"

#include <fstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "balloc/errors.h"

namespace balloc {
namespace {

absl::StatusOr<std::vector<double>> ParseRow(const std::string& line, int lineno) {
  std::vector<double> out;
  for (absl::string_view tok : absl::StrSplit(line, ',')) {
    tok = absl::StripAsciiWhitespace(tok);
    double v;
    if (!absl::SimpleAtod(tok, &v)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: cannot parse '%s' as a number", lineno, tok));
    }
    out.push_back(v);
  }
  return out;
}

void WriteRow(std::ostream& out, const double* v, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (i) out << ',';
    out << absl::StrFormat("%.17g", v[i]);
  }
  out << '\n';
}

}  // namespace

absl::StatusOr<StrategyMatrix> ReadMatrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) return absl::InvalidArgumentError("empty matrix file");
  std::vector<std::string> parts =
      absl::StrSplit(absl::StripAsciiWhitespace(header), ' ', absl::SkipEmpty());
  if (parts.size() != 5 || parts[0] != "#" || parts[1] != "balloc-matrix" ||
      parts[2] != "v1") {
    return absl::InvalidArgumentError("missing '# balloc-matrix v1' header");
  }
  std::string kind;
  int n = 0;
  for (int i = 3; i < 5; ++i) {
    std::pair<std::string, std::string> kv = absl::StrSplit(parts[i], '=');
    if (kv.first == "kind") {
      kind = kv.second;
    } else if (kv.first == "n") {
      if (!absl::SimpleAtoi(kv.second, &n) || n < 1) {
        return absl::InvalidArgumentError("bad n in matrix header");
      }
    } else {
      return absl::InvalidArgumentError("unknown header field " + kv.first);
    }
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!absl::StripAsciiWhitespace(line).empty()) lines.push_back(line);
  }
  if (kind == "toeplitz") {
    if (lines.size() != 1) {
      return absl::InvalidArgumentError("toeplitz file needs exactly one coefficient line");
    }
    auto row = ParseRow(lines[0], 2);
    if (!row.ok()) return row.status();
    return StrategyMatrix::Toeplitz(n, *std::move(row));
  }
  if (kind == "dense") {
    if (lines.size() != static_cast<size_t>(n)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("dense file needs %d rows, got %d", n, lines.size()));
    }
    std::vector<double> values;
    values.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      auto row = ParseRow(lines[i], i + 2);
      if (!row.ok()) return row.status();
      if (row->size() != static_cast<size_t>(n)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("row %d has %d entries, expected %d", i, row->size(), n));
      }
      values.insert(values.end(), row->begin(), row->end());
    }
    return StrategyMatrix::Dense(n, std::move(values));
  }
  return absl::InvalidArgumentError("unknown matrix kind '" + kind + "'");
}

absl::Status WriteMatrix(const StrategyMatrix& c, std::ostream& out) {
  const bool dense = c.kind() == StrategyMatrix::Kind::kDense;
  out << "# balloc-matrix v1 kind=" << (dense ? "dense" : "toeplitz") << " n=" << c.size()
      << '\n';
  if (dense) {
    std::span<const double> v = c.dense_values();
    for (int i = 0; i < c.size(); ++i) {
      WriteRow(out, v.data() + static_cast<size_t>(i) * c.size(), c.size());
    }
  } else {
    WriteRow(out, c.coefficients().data(), c.coefficients().size());
  }
  if (!out) return IoError("write failed");
  return absl::OkStatus();
}

absl::StatusOr<StrategyMatrix> LoadMatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) return IoError("cannot open " + path);
  return ReadMatrix(in);
}

absl::Status SaveMatrix(const StrategyMatrix& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) return IoError("cannot open " + path + " for writing");
  return WriteMatrix(c, out);
}

}  // namespace balloc
