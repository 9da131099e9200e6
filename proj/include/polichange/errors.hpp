#ifndef POLICHANGE_ERRORS_HPP
#define POLICHANGE_ERRORS_HPP

#include <stdexcept>

namespace polichange {

// Base type for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument values (violated preconditions).
struct ArgumentError : Error {
  using Error::Error;
};

// Unusable configuration: missing columns, bad schema, out-of-range settings.
struct ConfigError : Error {
  using Error::Error;
};

// Unreadable streams and files.
struct IoError : Error {
  using Error::Error;
};

// Malformed input data.
struct ParseError : Error {
  using Error::Error;
};

// Statistically undefined results (constant series, empty divider sets).
struct DegenerateError : Error {
  using Error::Error;
};

}  // namespace polichange

#endif
