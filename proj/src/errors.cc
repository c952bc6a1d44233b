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

#include "balloc/errors.h"

namespace balloc {

absl::Status SingularError(absl::string_view msg) {
  return absl::FailedPreconditionError(msg);
}
absl::Status TooLargeError(absl::string_view msg) {
  return absl::ResourceExhaustedError(msg);
}
absl::Status NumericalError(absl::string_view msg) { return absl::InternalError(msg); }
absl::Status UnachievableError(absl::string_view msg) {
  return absl::OutOfRangeError(msg);
}
absl::Status IoError(absl::string_view msg) { return absl::UnavailableError(msg); }

ErrorKind KindOf(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return ErrorKind::kOk;
    case absl::StatusCode::kInvalidArgument:
      return ErrorKind::kInvalidArgument;
    case absl::StatusCode::kFailedPrecondition:
      return ErrorKind::kSingular;
    case absl::StatusCode::kResourceExhausted:
      return ErrorKind::kTooLarge;
    case absl::StatusCode::kInternal:
      return ErrorKind::kNumerical;
    case absl::StatusCode::kOutOfRange:
      return ErrorKind::kUnachievable;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kNotFound:
      return ErrorKind::kIo;
    default:
      return ErrorKind::kInternal;
  }
}

}  // namespace balloc
