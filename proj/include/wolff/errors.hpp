#pragma once

#include <stdexcept>
#include <string>

namespace wolff {

// A query point falls outside the window's root region.
class OutOfWindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A level or ancestor step leaves the window's level range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad parameters: nonpositive radius, invalid kernel, misaligned box, ...
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input admits no meaningful answer (e.g. every cube has zero mass).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require_dimension(int expected, int actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(actual) +
                            " does not match " + std::to_string(expected));
  }
}

}  // namespace wolff
