// Copyright 2026 The FreqNorm Authors
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

#ifndef FREQNORM_ERRORS_H_
#define FREQNORM_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqnorm {

enum class ErrorKind {
  kShape,
  kDomain,
  kNonRealSignal,
  kConfig,
  kIo,
  kAbortedRun,
  kLookup,
  kVerification,
};

std::string_view to_string(ErrorKind kind);

/// Base of every exception thrown by the library. The kind is stable and
/// machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error(ErrorKind::kShape, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::kDomain, m) {}
};

/// An inverse transform produced a significant imaginary residue, which
/// means the spectrum handed to it was not conjugate-symmetric.
class NonRealSignalError : public Error {
 public:
  explicit NonRealSignalError(const std::string& m)
      : Error(ErrorKind::kNonRealSignal, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfig, m) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(ErrorKind::kIo, path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class AbortedRunError : public Error {
 public:
  explicit AbortedRunError(const std::string& m)
      : Error(ErrorKind::kAbortedRun, m) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& m) : Error(ErrorKind::kLookup, m) {}
};

}  // namespace freqnorm

#endif  // FREQNORM_ERRORS_H_
