#pragma once

#include <stdexcept>
#include <string>

namespace acc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid numeric parameter (sigma, radius, h, tile grid, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Violated data precondition (marks out of bounds, markers outside domain, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace acc
