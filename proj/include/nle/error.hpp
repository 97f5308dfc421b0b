// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nle {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes do not agree for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is outside its documented domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// CTC target cannot be emitted within the available prediction positions.
class InfeasibleTargetError : public Error {
 public:
  using Error::Error;
};

/// CTC target contains the blank symbol.
class InvalidTargetError : public Error {
 public:
  using Error::Error;
};

/// Insertion exceeds the free slot capacity of an interleaved layout.
class InfeasibleInsertError : public Error {
 public:
  using Error::Error;
};

/// Model input is longer than the configured number of positions.
class LengthError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Training diverged; carries the last checkpoint known to be finite.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::string last_good)
      : Error(what), last_good_(std::move(last_good)) {}

  const std::string& last_good_checkpoint() const noexcept { return last_good_; }

 private:
  std::string last_good_;
};

}  // namespace nle
