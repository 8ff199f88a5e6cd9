#include "query_oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fixtures {

using namespace cocoon;
using namespace cocoon::query;

std::optional<bool> oracle_eval(const Predicate& p, const ColumnTable& t, std::size_t row) {
  switch (p.kind) {
    case Predicate::Kind::IsNull:
      return t.column(p.column).is_null(row);
    case Predicate::Kind::IsNotNull:
      return !t.column(p.column).is_null(row);
    case Predicate::Kind::Not: {
      auto x = oracle_eval(p.operands[0], t, row);
      if (!x) return std::nullopt;
      return !*x;
    }
    case Predicate::Kind::And: {
      auto x = oracle_eval(p.operands[0], t, row);
      auto y = oracle_eval(p.operands[1], t, row);
      if ((x && !*x) || (y && !*y)) return false;
      if (x && y) return true;
      return std::nullopt;
    }
    case Predicate::Kind::Or: {
      auto x = oracle_eval(p.operands[0], t, row);
      auto y = oracle_eval(p.operands[1], t, row);
      if ((x && *x) || (y && *y)) return true;
      if (x && y) return false;
      return std::nullopt;
    }
    case Predicate::Kind::Compare:
      break;
  }
  const Value& cell = t.column(p.column)[row];
  if (is_null(cell)) return std::nullopt;
  int c = 0;
  if (auto s = std::get_if<std::string>(&cell)) {
    const auto& lit = std::get<std::string>(p.literal);
    c = *s < lit ? -1 : (*s == lit ? 0 : 1);
  } else if (auto b = std::get_if<bool>(&cell)) {
    c = *b == std::get<bool>(p.literal) ? 0 : 1;
  } else {
    const double x = std::holds_alternative<std::int64_t>(cell)
                         ? static_cast<double>(std::get<std::int64_t>(cell))
                         : std::get<double>(cell);
    const double y = std::holds_alternative<std::int64_t>(p.literal)
                         ? static_cast<double>(std::get<std::int64_t>(p.literal))
                         : std::get<double>(p.literal);
    c = x < y ? -1 : (x == y ? 0 : 1);
  }
  switch (p.op) {
    case CompareOp::Eq: return c == 0;
    case CompareOp::Ne: return c != 0;
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
  }
  return std::nullopt;
}

namespace {

Predicate random_leaf(std::mt19937_64& rng, const ColumnTable& t) {
  const auto& col = t.column(rng() % t.column_count());
  if (rng() % 5 == 0) return Predicate::is_null(col.name(), rng() % 2 == 0);
  static const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "zz", ""};
  switch (col.type()) {
    case PrimitiveType::Boolean:
      return Predicate::compare(col.name(), rng() % 2 ? CompareOp::Eq : CompareOp::Ne,
                                rng() % 2 == 0);
    case PrimitiveType::Integer:
    case PrimitiveType::Float: {
      const auto op = static_cast<CompareOp>(rng() % 6);
      if (rng() % 2) {
        return Predicate::compare(col.name(), op, static_cast<std::int64_t>(rng() % 5) - 2);
      }
      return Predicate::compare(col.name(), op, static_cast<double>(rng() % 9) * 0.25 - 1.0);
    }
    default:
      return Predicate::compare(col.name(), static_cast<CompareOp>(rng() % 6),
                                words[rng() % words.size()]);
  }
}

Predicate random_predicate(std::mt19937_64& rng, const ColumnTable& t, int depth) {
  if (depth == 0 || rng() % 3 == 0) return random_leaf(rng, t);
  switch (rng() % 3) {
    case 0:
      return Predicate::conjunction(random_predicate(rng, t, depth - 1),
                                    random_predicate(rng, t, depth - 1));
    case 1:
      return Predicate::disjunction(random_predicate(rng, t, depth - 1),
                                    random_predicate(rng, t, depth - 1));
    default:
      return Predicate::negation(random_predicate(rng, t, depth - 1));
  }
}

}  // namespace

QueryAst random_query(std::mt19937_64& rng, const ColumnTable& t) {
  QueryAst ast;
  ast.star = rng() % 3 == 0;
  if (!ast.star) {
    for (const auto& n : t.column_names()) {
      if (rng() % 2) ast.projection.push_back(n);
    }
    if (ast.projection.empty()) ast.projection.push_back(t.column(0).name());
  }
  if (rng() % 5 != 0) ast.predicate = random_predicate(rng, t, 3);
  if (rng() % 3 == 0) ast.limit = rng() % 20;
  return ast;
}

}  // namespace fixtures
