#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocoon {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed delimited input. Row and column are 1-based; row 1 is the first
// physical record in the file (the header when present).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& message);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class UnknownColumn : public Error {
 public:
  explicit UnknownColumn(const std::string& column);
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class EmptyColumn : public Error {
 public:
  using Error::Error;
};

class NotNumeric : public Error {
 public:
  using Error::Error;
};

class NotCategorical : public Error {
 public:
  using Error::Error;
};

// Query text violates the grammar. `offset` is a byte offset into the text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class BindError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class NoStructuredContent : public Error {
 public:
  using Error::Error;
};

class ValidationExhausted : public Error {
 public:
  ValidationExhausted(const std::string& step_id, std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class EditRejected : public Error {
 public:
  explicit EditRejected(const std::string& diagnostic);
  const std::string& diagnostic() const noexcept { return diagnostic_; }

 private:
  std::string diagnostic_;
};

class KindNotApplicable : public Error {
 public:
  using Error::Error;
};

class StepFailed : public Error {
 public:
  StepFailed(const std::string& step_id, const std::string& cause);
  const std::string& step_id() const noexcept { return step_id_; }

 private:
  std::string step_id_;
};

class UnknownStep : public Error {
 public:
  using Error::Error;
};

class AlreadyFinalized : public Error {
 public:
  using Error::Error;
};

class NothingToExport : public Error {
 public:
  using Error::Error;
};

class NoChartApplicable : public Error {
 public:
  using Error::Error;
};

// A write raced a running pipeline or a newer revision.
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace cocoon
