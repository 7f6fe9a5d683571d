// errors.hpp
// Exception types shared across the library; the CLI maps them to exit codes.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace penmf {

// Operand dimensions do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter is outside its allowed range (rank, split counts, grids, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates a domain precondition (negative or non-finite entries).
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed file contents; byte_offset() locates the failure when known.
class ParseError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ParseError(const std::string& what) : std::runtime_error(what), offset_(npos) {}
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Filesystem failure with path context.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN or infinity surfaced while iterating; iteration() names the sweep.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace penmf
