// Copyright 2026 The sdpent Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace sdpent {

// Root of every exception thrown by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from the closest existing one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise unusable numeric input.
class InputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Eigenvalue at or below the floor where a logarithm was requested.
class SupportError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class KernelDimensionError : public Error {
 public:
  KernelDimensionError(int dimension, const std::string& what)
      : Error(what), dimension_(dimension) {}
  int dimension() const { return dimension_; }

 private:
  int dimension_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A state or payload parsed correctly but violates a named invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : Error(what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Two routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A closed form was requested where its defining identity does not hold.
class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdpent
