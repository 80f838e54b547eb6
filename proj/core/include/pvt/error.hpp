#pragma once

#include <stdexcept>
#include <string>

namespace pvt {

/// A value lies outside the domain an operation accepts (p > 1, NaN, sigma <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Array shapes disagree or violate a divisibility requirement.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file was readable but its contents do not match the expected format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Open/read/write failures, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pvt
