#pragma once

#include <stdexcept>
#include <string>

namespace owl3d {

// Base for data-dependent failures (bad files, schema violations, empty pools).
// Precondition violations on in-process arguments use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: wrong byte counts, wrong field arity, schema violations.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures; the message always carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace owl3d
