/* Copyright 2026 The vmsolver Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef VMSOLVER_ERROR_HPP_
#define VMSOLVER_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vmsolver {

enum class ErrorCode {
  kMissingField,
  kNonPositiveValue,
  kDuplicateName,
  kUnreadableSource,
  kUnknownModel,
  kUnknownInstance,
  kInvalidModel,
  kInvalidWorkload,
  kOverflow,
  kInvalidCoefficient,
  kDegenerateTask,
  kDegenerateJob,
  kInsufficientSamples,
  kDegenerateDesign,
  kSchemaError,
  kUnsuitableInstance,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField:
      return "MissingField";
    case ErrorCode::kNonPositiveValue:
      return "NonPositiveValue";
    case ErrorCode::kDuplicateName:
      return "DuplicateName";
    case ErrorCode::kUnreadableSource:
      return "UnreadableSource";
    case ErrorCode::kUnknownModel:
      return "UnknownModel";
    case ErrorCode::kUnknownInstance:
      return "UnknownInstance";
    case ErrorCode::kInvalidModel:
      return "InvalidModel";
    case ErrorCode::kInvalidWorkload:
      return "InvalidWorkload";
    case ErrorCode::kOverflow:
      return "Overflow";
    case ErrorCode::kInvalidCoefficient:
      return "InvalidCoefficient";
    case ErrorCode::kDegenerateTask:
      return "DegenerateTask";
    case ErrorCode::kDegenerateJob:
      return "DegenerateJob";
    case ErrorCode::kInsufficientSamples:
      return "InsufficientSamples";
    case ErrorCode::kDegenerateDesign:
      return "DegenerateDesign";
    case ErrorCode::kSchemaError:
      return "SchemaError";
    case ErrorCode::kUnsuitableInstance:
      return "UnsuitableInstance";
  }
  return "Unknown";
}

// All recoverable failures in the library are reported through this type.
// `subject()` names the offending field, instance, model or row when there is
// one, so callers (CLI, HTTP) can point at it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace vmsolver

#endif  // VMSOLVER_ERROR_HPP_
