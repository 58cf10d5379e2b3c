#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace smrec {

/// Dense vertex / row / column index.
using Index = std::uint32_t;
/// Identifier as it appears in the input files (MovieLens user or movie id).
using ExternalId = std::int64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad command line or configuration value.
class UsageError : public Error {
public:
  using Error::Error;
};

/// Missing, unreadable or malformed input data.
class DataError : public Error {
public:
  using Error::Error;
};

class ParseError : public DataError {
public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Numerical failure inside a kernel (non-convergence, inconsistent inputs).
class ComputeError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public ComputeError {
public:
  explicit ConvergenceError(std::size_t iterations)
      : ComputeError("closure did not reach a fixed point after " +
                     std::to_string(iterations) + " compositions"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::size_t iterations_;
};

}  // namespace smrec
