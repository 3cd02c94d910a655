// include/lid/error.hpp

// Copyright 2026  The lidda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LID_ERROR_HPP_
#define LID_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lid {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input that is valid in shape but too short for the operation
/// (conv input shorter than the kernel, audio shorter than a frame).
class InputTooShortError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

/// Malformed or missing data: files, manifests, labels.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf reached a place where it must not.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lid

#endif  // LID_ERROR_HPP_
