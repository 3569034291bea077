// Copyright 2026 The OrthoForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orthoforge {

/// Error taxonomy shared by the library and the CLI. The numeric value of each
/// category is the process exit code used by `orthoforge`.
enum class ErrorCategory : int {
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kGeometry = 5,
  kDomain = 6,
};

std::string_view category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::kIo, message) {}
};

/// Malformed files: bad headers, bad magic, schema violations.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error(ErrorCategory::kFormat, message) {}
};

/// Degenerate input geometry (collinear samples, no dominant plane).
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& message)
      : Error(ErrorCategory::kGeometry, message) {}
};

/// Numeric or domain precondition violated by an argument.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorCategory::kDomain, message) {}
};

/// Raised by RANSAC when no plane gathers enough support. Callers are expected
/// to fall back to correspondence-driven orthorectification.
class NoPlaneError : public GeometryError {
 public:
  explicit NoPlaneError(const std::string& message) : GeometryError(message) {}
};

}  // namespace orthoforge
