/*
 * Copyright 2026 The SPA Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace spa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad count, size mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input data: parse failures, corrupted model files,
/// I/O errors.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The geometry does not determine a unique answer (collinear correspondences,
/// rank-deficient covariance).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// A command line or configuration file that cannot be acted on.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace spa
