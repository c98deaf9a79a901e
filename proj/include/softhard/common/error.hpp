#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softhard {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed formula text. `position` is a 0-based byte offset into the input.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at offset " + std::to_string(position)),
        position(position) {}
  std::size_t position;
};

// A caller violated an operation's precondition (empty input, unknown
// symbol, all-masked score row, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// Matrix shapes that do not line up.
struct DimensionError : Error {
  using Error::Error;
};

// Formula/mode combination the compiler cannot honor.
struct ModeError : Error {
  using Error::Error;
};

// An approximate-Boolean or error-budget contract was observed to fail at
// run time.
struct ContractBreach : Error {
  using Error::Error;
};

}  // namespace softhard
