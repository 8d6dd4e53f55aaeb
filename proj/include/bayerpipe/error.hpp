// Copyright 2026 The bayerpipe Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BAYERPIPE_ERROR_HPP_
#define BAYERPIPE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace bayerpipe {

// Broad failure classes. The CLI maps each one to its own exit code.
enum class ErrorKind {
  kParse,      // malformed file contents
  kIo,         // file missing, unreadable, unwritable
  kDimension,  // image shapes incompatible with the operation
  kParameter,  // invalid configuration value
  kDomain,     // input values outside an operator's domain
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  // `offset` is the byte position in the file where parsing failed.
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::kParse,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        reason_(what),
        offset_(offset) {}

  const std::string& reason() const noexcept { return reason_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::kParameter, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::kDomain, what) {}
};

}  // namespace bayerpipe

#endif  // BAYERPIPE_ERROR_HPP_
