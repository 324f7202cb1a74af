#ifndef GENRBF_ERROR_HPP_
#define GENRBF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace genrbf {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input files or inconsistent datasets.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, std::size_t row)
        : Error("row " + std::to_string(row + 1) + ": " + msg), row_(row) {}
    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

/// Numerical failure (singular matrix, overflow, diverging iteration).
class NumericError : public Error {
  public:
    using Error::Error;
};

}  // namespace genrbf

#endif  // GENRBF_ERROR_HPP_
