// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rpdnn {

/// Bad flags, bad config values, unusable paths. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf in a forward pass, failed gradient check. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch between tensors or parameters (programming error).
class ShapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

[[noreturn]] void throw_shape(const std::string& where, const std::string& what);

}  // namespace rpdnn
