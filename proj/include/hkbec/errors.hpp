// Copyright 2026 hkbec contributors
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

namespace hkbec {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: non-positive geometry, malformed config, wrong dimension.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Data that parses but breaks a structural invariant (ordering, ground state).
class InvariantError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Argument outside the mathematical domain of a function.
class DomainError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class RangeError : public Error {
public:
  using Error::Error;
};

// Enumeration or allocation would exceed configured limits.
class ResourceError : public Error {
public:
  using Error::Error;
};

// Text input that does not follow the expected format.
class ParseError : public ValidationError {
public:
  ParseError(const std::string& source, int line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

// A series, root finder or quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

class CutoffError : public ConvergenceError {
public:
  CutoffError(const std::string& what, double required_cutoff)
      : ConvergenceError(what), required_(required_cutoff) {}
  double required_cutoff() const noexcept { return required_; }

private:
  double required_;
};

class TruncationError : public ConvergenceError {
public:
  TruncationError(const std::string& what, int required_nmax)
      : ConvergenceError(what), required_(required_nmax) {}
  int required_nmax() const noexcept { return required_; }

private:
  int required_;
};

}  // namespace hkbec
