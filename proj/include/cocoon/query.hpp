#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cocoon/table.hpp"

namespace cocoon::query {

// Grammar (keywords case-insensitive, table implicit):
//   query      := SELECT projection [WHERE or_expr] [LIMIT integer] [';']
//   projection := '*' | column (',' column)*
//   or_expr    := and_expr (OR and_expr)*
//   and_expr   := not_expr (AND not_expr)*
//   not_expr   := NOT not_expr | primary
//   primary    := '(' or_expr ')' | column op literal | column IS [NOT] NULL
//   op         := '=' | '!=' | '<>' | '<' | '<=' | '>' | '>='
//   literal    := ['-'] number | 'string' | TRUE | FALSE
//   column     := identifier | "quoted identifier"

inline constexpr std::size_t kDefaultLimit = 200;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

using Literal = std::variant<std::int64_t, double, std::string, bool>;

struct Predicate {
  enum class Kind { Compare, IsNull, IsNotNull, And, Or, Not };

  Kind kind = Kind::Compare;
  std::string column;               // Compare, IsNull, IsNotNull
  CompareOp op = CompareOp::Eq;     // Compare
  Literal literal = std::int64_t{0};  // Compare
  std::vector<Predicate> operands;  // And/Or: two, Not: one

  bool operator==(const Predicate&) const = default;

  static Predicate compare(std::string column, CompareOp op, Literal literal);
  static Predicate is_null(std::string column, bool negated = false);
  static Predicate conjunction(Predicate lhs, Predicate rhs);
  static Predicate disjunction(Predicate lhs, Predicate rhs);
  static Predicate negation(Predicate operand);
};

struct QueryAst {
  bool star = false;
  std::vector<std::string> projection;  // empty when star
  std::optional<Predicate> predicate;
  std::optional<std::size_t> limit;

  bool operator==(const QueryAst&) const = default;
};

// Throws SyntaxError with the byte offset and the expected-token set.
QueryAst parse_query(std::string_view text);

// Canonical text: uppercase keywords, binary operators fully parenthesised.
std::string render_query(const QueryAst& ast);

struct QueryResult {
  std::vector<std::string> columns;
  std::vector<std::size_t> row_indices;  // source rows, ascending
  std::vector<Row> rows;
};

// Binds `ast` against the table schema (BindError on unknown column or type
// mismatch) and evaluates with three-valued logic; a comparison with Null is
// never true. Column names resolve exactly, then case-insensitively when unique.
QueryResult execute_query(const QueryAst& ast, const ColumnTable& table);

QueryResult run_query(std::string_view text, const ColumnTable& table);

}  // namespace cocoon::query
