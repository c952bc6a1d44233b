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

#ifndef BALLOC_ERRORS_H_
#define BALLOC_ERRORS_H_

#include "absl/strings/string_view.h"

#include "absl/status/status.h"

namespace balloc {

// Library error categories, carried on absl::Status codes.
enum class ErrorKind {
  kOk,
  kInvalidArgument,
  kSingular,
  kTooLarge,
  kNumerical,
  kUnachievable,
  kIo,
  kInternal,
};

absl::Status SingularError(absl::string_view msg);
absl::Status TooLargeError(absl::string_view msg);
absl::Status NumericalError(absl::string_view msg);
absl::Status UnachievableError(absl::string_view msg);
absl::Status IoError(absl::string_view msg);

ErrorKind KindOf(const absl::Status& status);

}  // namespace balloc

#endif  // BALLOC_ERRORS_H_
