#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmrf {

//! Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what)
    , line_(line)
  {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

//! Well-formed input that violates a data invariant.
class ValidationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Non-finite or otherwise unusable numerical result.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! A file that cannot be opened, read, or written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace cmrf
