/* Copyright 2026 The smx Authors. All Rights Reserved.

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

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace smx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter, factor, or variant selection.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  BoundsError(std::string axis, std::size_t index, std::size_t extent)
      : Error("index " + std::to_string(index) + " out of bounds on axis '" +
              axis + "' (extent " + std::to_string(extent) + ")"),
        axis_(std::move(axis)) {}
  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

// Weights-file and text-format errors. Every concrete failure has its own
// type so callers (and the CLI exit-code mapping) can tell them apart.
class ParseError : public Error {
 public:
  using Error::Error;
};

class MagicError : public ParseError {
 public:
  using ParseError::ParseError;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncationError : public ParseError {
 public:
  explicit TruncationError(std::string what_part)
      : ParseError("file truncated while reading '" + what_part + "'"),
        part_(std::move(what_part)) {}
  /// Name of the tensor (or "header") being read when input ran out.
  const std::string& part() const noexcept { return part_; }

 private:
  std::string part_;
};

class ShapeMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TrailingBytesError : public ParseError {
 public:
  using ParseError::ParseError;
};

class ConfigMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Malformed key:value config text; carries the 1-based line number.
class ConfigSyntaxError : public ParseError {
 public:
  ConfigSyntaxError(std::size_t line, const std::string& msg)
      : ParseError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ImageIoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smx
