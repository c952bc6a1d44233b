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

#ifndef BALLOC_STATUS_MACROS_H_
#define BALLOC_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define BALLOC_CONCAT_INNER_(a, b) a##b
#define BALLOC_CONCAT_(a, b) BALLOC_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                    \
  do {                                           \
    absl::Status balloc_status_ = (expr);        \
    if (!balloc_status_.ok()) return balloc_status_; \
  } while (0)

#define BALLOC_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                  \
  if (!tmp.ok()) return tmp.status();                  \
  lhs = std::move(tmp).value()

#define ASSIGN_OR_RETURN(lhs, rexpr) \
  BALLOC_ASSIGN_OR_RETURN_IMPL_(BALLOC_CONCAT_(statusor_, __LINE__), lhs, rexpr)

#endif  // BALLOC_STATUS_MACROS_H_
