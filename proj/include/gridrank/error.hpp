#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed fixed-column or structured input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t col_begin, std::size_t col_end)
      : Error(what), line_(line), col_begin_(col_begin), col_end_(col_end) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t col_begin() const noexcept { return col_begin_; }
  std::size_t col_end() const noexcept { return col_end_; }

 private:
  std::size_t line_ = 0;
  std::size_t col_begin_ = 0;
  std::size_t col_end_ = 0;
};

/// Input ended before a required section terminator.
class TruncationError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Structured-text document does not match the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A well-formed case violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A matrix element or factorisation is singular.
class SingularError : public Error {
 public:
  SingularError(const std::string& what, int bus = 0) : Error(what), bus_(bus) {}
  /// Bus id associated with the singular pivot, 0 when not applicable.
  int bus() const noexcept { return bus_; }

 private:
  int bus_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  /// Max-norm mismatch recorded at the start of every iteration.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Branch flows and case branches disagree.
class MappingError : public Error {
 public:
  using Error::Error;
};

/// A graph algorithm hit a configured resource cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Graph is not connected where connectivity is required.
class DisconnectedError : public Error {
 public:
  DisconnectedError(const std::string& what, std::vector<std::vector<int>> components)
      : Error(what), components_(std::move(components)) {}
  const std::vector<std::vector<int>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<int>> components_;
};

}  // namespace gridrank
