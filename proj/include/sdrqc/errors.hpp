#pragma once

#include <stdexcept>
#include <string>

namespace sdrqc {

// Root of every error the library throws on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid geometry or model parameters.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// k^q does not fit the exact integer range.
class CapacityOverflow : public Error {
 public:
  using Error::Error;
};

// A pattern or code does not match the width/geometry it is used with.
class WidthMismatch : public Error {
 public:
  using Error::Error;
};

// An operation needs a fully active code and there is none.
class NoActiveState : public Error {
 public:
  explicit NoActiveState(const std::string& what = "no active state") : Error(what) {}
};

// Malformed text or binary input (pattern files, model files, code text).
class FormatError : public Error {
 public:
  using Error::Error;
};

class DuplicateLabel : public Error {
 public:
  using Error::Error;
};

// A requested experiment input cannot be generated (too many distinct
// patterns, unattainable overlap, ...).
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdrqc
