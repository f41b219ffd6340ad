/**
 * Copyright 2026 The shiftsearch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHIFTSEARCH_ERRORS_HPP
#define SHIFTSEARCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shiftsearch {

/// Invalid user-supplied configuration (flags, presets, tuple strings, set documents).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system or image/dataset decoding failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model file written by an incompatible format version (or not a model file at all).
class VersionError : public IoError {
 public:
  using IoError::IoError;
};

/// Model file with the right header but inconsistent or truncated payload.
class CorruptFileError : public IoError {
 public:
  using IoError::IoError;
};

/// Transport or protocol failure talking to an external oracle process.
class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss or similar numeric breakdown during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fitness evaluation failed; carries the serialized tuple that was being scored.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string tuple_text, const std::string& what)
      : std::runtime_error("fitness evaluation failed for tuple '" + tuple_text + "': " + what),
        tuple_text_(std::move(tuple_text)) {}

  const std::string& tuple_text() const noexcept { return tuple_text_; }

 private:
  std::string tuple_text_;
};

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_ERRORS_HPP
