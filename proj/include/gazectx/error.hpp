/*
 * Copyright 2026 The gazectx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
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

namespace gazectx {

// Root of every error thrown by the library. The CLI maps subclasses to exit
// codes: DomainError/InputError/ValidationError -> 1, UsageError -> 2,
// TransportExhausted -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Fewer vertices than an operation needs.
class DegenerateInput : public DomainError {
 public:
  using DomainError::DomainError;
};

// The camera sits inside the object being projected.
class DegenerateProjection : public DomainError {
 public:
  using DomainError::DomainError;
};

// An object queried in a frame that does not observe it.
class AbsentObservation : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed input data (sample streams, files).
class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PlacementFailure : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Every trial at one context length failed in transport.
class TransportExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace gazectx
