#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scriptaffect {

// Base for every error raised by the library. Callers that only care about
// "the pipeline failed" catch this; finer handlers catch the leaves.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

class NameError : public Error {
 public:
  using Error::Error;
};

// Errors tied to a line of tabular input carry the 1-based line number.
class LineError : public Error {
 public:
  LineError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MetadataError : public LineError {
 public:
  using LineError::LineError;
};

class LexiconError : public LineError {
 public:
  using LineError::LineError;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class CurveError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StaleInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace scriptaffect
