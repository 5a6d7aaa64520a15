/* Copyright 2026 The kws-crnn Authors. All Rights Reserved.

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

#ifndef KWS_ERRORS_HPP_
#define KWS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace kws {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed, truncated or otherwise corrupt file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed file that uses an encoding or version we do not handle.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Invalid or mutually inconsistent configuration, including bad arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor or matrix shape disagreement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input values outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Problems with dataset manifests or ground-truth content.
class DataError : public Error {
 public:
  using Error::Error;
};

// I/O failure (missing file, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kws

#endif  // KWS_ERRORS_HPP_
