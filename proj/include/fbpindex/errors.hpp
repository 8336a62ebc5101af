// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FBPINDEX_ERRORS_HPP_
#define FBPINDEX_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fbpindex {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched template lengths, embedding dimensions or scheme labels.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller passed an out-of-range or inconsistent argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An object was used before it reached a usable state.
class StateError : public Error {
 public:
  using Error::Error;
};

// A configuration file or configuration value is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A dataset or index file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Dataset contents violate a documented requirement.
class DataError : public Error {
 public:
  using Error::Error;
};

// Enrolment rejected, e.g. a duplicate subject identifier.
class EnrollmentError : public Error {
 public:
  using Error::Error;
};

// An evaluation protocol cannot be realised on the given data.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbpindex

#endif  // FBPINDEX_ERRORS_HPP_
