// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ptr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line usage (unknown flag, missing argument).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Invalid input data: malformed files, spec violations, bad spans, IO failures.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Tensor or vector dimensions disagree with the schema or configuration.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A loss or gradient became non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Located syntax or reference error in a rule-language source.
class ParseError : public DataError {
 public:
  ParseError(std::string message, int line, int column)
      : DataError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

}  // namespace ptr
