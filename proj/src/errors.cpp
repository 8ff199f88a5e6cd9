#include "cocoon/errors.hpp"

#include <sstream>
#include <utility>

namespace cocoon {

namespace {

std::string syntax_message(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& found) {
  std::ostringstream out;
  out << "syntax error at offset " << offset << ": expected ";
  if (expected.size() > 1) out << "one of ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out << ", ";
    out << expected[i];
  }
  out << "; found " << found;
  return out.str();
}

std::string exhausted_message(const std::string& step_id,
                              const std::vector<std::string>& diagnostics) {
  std::ostringstream out;
  out << "validation exhausted for step " << step_id << " after " << diagnostics.size()
      << " attempt(s)";
  for (std::size_t i = 0; i < diagnostics.size(); ++i) {
    out << "\n  attempt " << (i + 1) << ": " << diagnostics[i];
  }
  return out.str();
}

}  // namespace

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& message)
    : Error("parse error at row " + std::to_string(row) + ", column " + std::to_string(column) +
            ": " + message),
      row_(row),
      column_(column) {}

UnknownColumn::UnknownColumn(const std::string& column)
    : Error("unknown column: " + column), column_(column) {}

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& found)
    : Error(syntax_message(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

ValidationExhausted::ValidationExhausted(const std::string& step_id,
                                         std::vector<std::string> diagnostics)
    : Error(exhausted_message(step_id, diagnostics)), diagnostics_(std::move(diagnostics)) {}

EditRejected::EditRejected(const std::string& diagnostic)
    : Error("edit rejected: " + diagnostic), diagnostic_(diagnostic) {}

StepFailed::StepFailed(const std::string& step_id, const std::string& cause)
    : Error("step " + step_id + " failed: " + cause), step_id_(step_id) {}

}  // namespace cocoon
