#include "cocoon/query.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "cocoon/errors.hpp"

namespace cocoon::query {

namespace {

// ---- lexer ---------------------------------------------------------------

enum class Tok { Keyword, Identifier, Number, String, Symbol, End };

struct Token {
  Tok type = Tok::End;
  std::string text;  // keyword uppercased; identifier unquoted; string unescaped
  std::size_t offset = 0;
};

constexpr std::string_view kKeywords[] = {"SELECT", "WHERE", "LIMIT", "AND",   "OR",  "NOT",
                                          "IS",     "NULL",  "TRUE",  "FALSE", "FROM"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_keyword(std::string_view word) {
  const auto u = upper(word);
  return std::find(std::begin(kKeywords), std::end(kKeywords), u) != std::end(kKeywords);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::End: return "end of input";
    case Tok::String: return "string '" + t.text + "'";
    case Tok::Identifier: return "identifier " + t.text;
    default: return t.text;
  }
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      const auto word = s.substr(start, i - start);
      if (is_keyword(word)) {
        out.push_back({Tok::Keyword, upper(word), start});
      } else {
        out.push_back({Tok::Identifier, std::string(word), start});
      }
    } else if (digit(c) || (c == '.' && i + 1 < s.size() && digit(s[i + 1]))) {
      while (i < s.size() && digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && digit(s[j])) {
          i = j;
          while (i < s.size() && digit(s[i])) ++i;
        }
      }
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
    } else if (c == '\'' || c == '"') {
      const char q = c;
      std::string text;
      ++i;
      bool closed = false;
      while (i < s.size()) {
        if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            text.push_back(q);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        text.push_back(s[i++]);
      }
      if (!closed) {
        throw SyntaxError(start, {q == '\'' ? "closing '" : "closing \""}, "end of input");
      }
      out.push_back({q == '\'' ? Tok::String : Tok::Identifier, std::move(text), start});
    } else {
      std::string sym(1, c);
      if (i + 1 < s.size()) {
        const std::string two{c, s[i + 1]};
        if (two == "!=" || two == "<>" || two == "<=" || two == ">=") sym = two;
      }
      static const std::string kSingles = "*,()=<>-;";
      if (sym.size() == 1 && kSingles.find(c) == std::string::npos) {
        throw SyntaxError(start, {"token"}, "character '" + sym + "'");
      }
      i += sym.size();
      out.push_back({Tok::Symbol, sym, start});
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// ---- parser --------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  QueryAst parse() {
    QueryAst ast;
    expect_keyword("SELECT");
    if (peek_symbol("*")) {
      advance();
      ast.star = true;
    } else {
      ast.projection.push_back(column({"*", "column name"}));
      while (peek_symbol(",")) {
        advance();
        ast.projection.push_back(column({"column name"}));
      }
    }
    if (peek_keyword("WHERE")) {
      advance();
      ast.predicate = or_expr();
    }
    if (peek_keyword("LIMIT")) {
      advance();
      const Token& t = cur();
      if (t.type != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
        fail({"non-negative integer"});
      }
      const auto v = parse_integer(t.text);
      if (!v) fail({"non-negative integer"});
      ast.limit = static_cast<std::size_t>(*v);
      advance();
    }
    if (peek_symbol(";")) advance();
    if (cur().type != Tok::End) {
      std::vector<std::string> expected;
      if (!ast.predicate && !ast.limit) expected.push_back("WHERE");
      if (!ast.limit) expected.push_back("LIMIT");
      if (ast.predicate && !ast.limit) expected.insert(expected.begin(), {"AND", "OR"});
      expected.push_back("end of input");
      fail(expected);
    }
    return ast;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  void advance() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool peek_keyword(std::string_view kw) const {
    return cur().type == Tok::Keyword && cur().text == kw;
  }
  bool peek_symbol(std::string_view sym) const {
    return cur().type == Tok::Symbol && cur().text == sym;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw SyntaxError(cur().offset, std::move(expected), describe(cur()));
  }
  void expect_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) fail({std::string(kw)});
    advance();
  }

  std::string column(std::vector<std::string> expected) {
    if (cur().type != Tok::Identifier) fail(std::move(expected));
    std::string name = cur().text;
    advance();
    return name;
  }

  Predicate or_expr() {
    Predicate lhs = and_expr();
    while (peek_keyword("OR")) {
      advance();
      lhs = Predicate::disjunction(std::move(lhs), and_expr());
    }
    return lhs;
  }

  Predicate and_expr() {
    Predicate lhs = not_expr();
    while (peek_keyword("AND")) {
      advance();
      lhs = Predicate::conjunction(std::move(lhs), not_expr());
    }
    return lhs;
  }

  Predicate not_expr() {
    if (peek_keyword("NOT")) {
      advance();
      return Predicate::negation(not_expr());
    }
    return primary();
  }

  Predicate primary() {
    if (peek_symbol("(")) {
      advance();
      Predicate inner = or_expr();
      if (!peek_symbol(")")) fail({")", "AND", "OR"});
      advance();
      return inner;
    }
    std::string col = column({"(", "NOT", "column name"});
    if (peek_keyword("IS")) {
      advance();
      bool negated = false;
      if (peek_keyword("NOT")) {
        advance();
        negated = true;
      }
      if (!peek_keyword("NULL")) fail({"NULL", "NOT"});
      advance();
      return Predicate::is_null(std::move(col), negated);
    }
    const CompareOp op = comparison_op();
    return Predicate::compare(std::move(col), op, literal());
  }

  CompareOp comparison_op() {
    static const std::pair<std::string_view, CompareOp> kOps[] = {
        {"=", CompareOp::Eq},  {"!=", CompareOp::Ne}, {"<>", CompareOp::Ne}, {"<", CompareOp::Lt},
        {"<=", CompareOp::Le}, {">", CompareOp::Gt},  {">=", CompareOp::Ge}};
    if (cur().type == Tok::Symbol) {
      for (const auto& [sym, op] : kOps) {
        if (cur().text == sym) {
          advance();
          return op;
        }
      }
    }
    fail({"IS", "=", "!=", "<>", "<", "<=", ">", ">="});
  }

  Literal literal() {
    static const std::vector<std::string> kExpected = {"number", "string literal", "TRUE",
                                                       "FALSE"};
    if (peek_keyword("TRUE") || peek_keyword("FALSE")) {
      const bool v = cur().text == "TRUE";
      advance();
      return v;
    }
    if (cur().type == Tok::String) {
      std::string v = cur().text;
      advance();
      return v;
    }
    bool negative = false;
    if (peek_symbol("-")) {
      negative = true;
      advance();
      if (cur().type != Tok::Number) fail({"number"});
    }
    if (cur().type != Tok::Number) fail(kExpected);
    const std::string text = (negative ? "-" : "") + cur().text;
    if (auto i = parse_integer(text)) {
      advance();
      return *i;
    }
    if (text.find_first_of(".eE") == std::string::npos) fail({"integer within 64-bit range"});
    if (auto d = parse_float(text)) {
      advance();
      return *d;
    }
    fail({"finite number"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---- rendering -----------------------------------------------------------

std::string render_column(const std::string& name) {
  const bool bare = !name.empty() && ident_start(name[0]) &&
                    std::all_of(name.begin(), name.end(), ident_char) && !is_keyword(name);
  if (bare) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_literal(const Literal& lit) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "TRUE" : "FALSE";
        } else {
          std::string out = "'";
          for (char c : v) {
            if (c == '\'') out += '\'';
            out += c;
          }
          return out + "'";
        }
      },
      lit);
}

std::string_view op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

std::string render_predicate(const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::Compare:
      return render_column(p.column) + " " + std::string(op_text(p.op)) + " " +
             render_literal(p.literal);
    case Predicate::Kind::IsNull: return render_column(p.column) + " IS NULL";
    case Predicate::Kind::IsNotNull: return render_column(p.column) + " IS NOT NULL";
    case Predicate::Kind::And:
      return "(" + render_predicate(p.operands[0]) + " AND " + render_predicate(p.operands[1]) +
             ")";
    case Predicate::Kind::Or:
      return "(" + render_predicate(p.operands[0]) + " OR " + render_predicate(p.operands[1]) +
             ")";
    case Predicate::Kind::Not: return "NOT (" + render_predicate(p.operands[0]) + ")";
  }
  return {};
}

// ---- binding and evaluation ----------------------------------------------

enum class Tri { False, True, Unknown };

struct Bound {
  Predicate::Kind kind = Predicate::Kind::Compare;
  std::size_t column = 0;
  CompareOp op = CompareOp::Eq;
  Value literal;
  std::vector<Bound> operands;
};

std::size_t resolve(const ColumnTable& t, const std::string& name) {
  if (auto exact = t.find_column(name)) return *exact;
  const auto target = upper(name);
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < t.column_count(); ++i) {
    if (upper(t.column(i).name()) == target) {
      if (found) throw BindError("ambiguous column name: " + name);
      found = i;
    }
  }
  if (!found) throw BindError("unknown column: " + name);
  return *found;
}

std::string literal_kind(const Literal& lit) {
  switch (lit.index()) {
    case 0: return "integer literal";
    case 1: return "float literal";
    case 2: return "string literal";
    default: return "boolean literal";
  }
}

Value bind_literal(const Column& col, CompareOp op, const Literal& lit) {
  auto mismatch = [&] {
    return BindError("type mismatch: column " + col.name() + " (" +
                     std::string(to_string(col.type())) + ") compared with " +
                     literal_kind(lit));
  };
  switch (col.type()) {
    case PrimitiveType::Integer:
    case PrimitiveType::Float:
      if (auto i = std::get_if<std::int64_t>(&lit)) return *i;
      if (auto d = std::get_if<double>(&lit)) return *d;
      throw mismatch();
    case PrimitiveType::String:
      if (auto s = std::get_if<std::string>(&lit)) return *s;
      throw mismatch();
    case PrimitiveType::Boolean:
      if (auto b = std::get_if<bool>(&lit)) {
        if (op != CompareOp::Eq && op != CompareOp::Ne) {
          throw BindError("boolean column " + col.name() + " supports only = and !=");
        }
        return *b;
      }
      throw mismatch();
    case PrimitiveType::Date:
      if (auto s = std::get_if<std::string>(&lit)) {
        if (auto d = parse_date(*s)) return *d;
        throw BindError("'" + *s + "' is not a date (expected YYYY-MM-DD)");
      }
      throw mismatch();
    case PrimitiveType::Timestamp:
      if (auto s = std::get_if<std::string>(&lit)) {
        if (auto ts = parse_timestamp(*s)) return *ts;
        if (auto d = parse_date(*s)) return Timestamp{std::int64_t{d->days} * 86400000000LL};
        throw BindError("'" + *s + "' is not an ISO-8601 timestamp");
      }
      throw mismatch();
  }
  throw mismatch();
}

Bound bind(const Predicate& p, const ColumnTable& t) {
  Bound b;
  b.kind = p.kind;
  switch (p.kind) {
    case Predicate::Kind::Compare:
      b.column = resolve(t, p.column);
      b.op = p.op;
      b.literal = bind_literal(t.column(b.column), p.op, p.literal);
      break;
    case Predicate::Kind::IsNull:
    case Predicate::Kind::IsNotNull: b.column = resolve(t, p.column); break;
    default:
      for (const auto& child : p.operands) b.operands.push_back(bind(child, t));
  }
  return b;
}

Tri eval(const Bound& b, const ColumnTable& t, std::size_t row) {
  switch (b.kind) {
    case Predicate::Kind::Compare: {
      const Value& v = t.column(b.column)[row];
      if (is_null(v)) return Tri::Unknown;
      const auto ord = compare_values(v, b.literal);
      bool r = false;
      switch (b.op) {
        case CompareOp::Eq: r = ord == 0; break;
        case CompareOp::Ne: r = ord != 0; break;
        case CompareOp::Lt: r = ord < 0; break;
        case CompareOp::Le: r = ord <= 0; break;
        case CompareOp::Gt: r = ord > 0; break;
        case CompareOp::Ge: r = ord >= 0; break;
      }
      return r ? Tri::True : Tri::False;
    }
    case Predicate::Kind::IsNull: return t.column(b.column).is_null(row) ? Tri::True : Tri::False;
    case Predicate::Kind::IsNotNull:
      return t.column(b.column).is_null(row) ? Tri::False : Tri::True;
    case Predicate::Kind::Not: {
      const Tri x = eval(b.operands[0], t, row);
      return x == Tri::Unknown ? Tri::Unknown : (x == Tri::True ? Tri::False : Tri::True);
    }
    case Predicate::Kind::And: {
      const Tri x = eval(b.operands[0], t, row);
      if (x == Tri::False) return Tri::False;
      const Tri y = eval(b.operands[1], t, row);
      if (y == Tri::False) return Tri::False;
      return (x == Tri::True && y == Tri::True) ? Tri::True : Tri::Unknown;
    }
    case Predicate::Kind::Or: {
      const Tri x = eval(b.operands[0], t, row);
      if (x == Tri::True) return Tri::True;
      const Tri y = eval(b.operands[1], t, row);
      if (y == Tri::True) return Tri::True;
      return (x == Tri::False && y == Tri::False) ? Tri::False : Tri::Unknown;
    }
  }
  return Tri::Unknown;
}

}  // namespace

Predicate Predicate::compare(std::string column, CompareOp op, Literal literal) {
  Predicate p;
  p.kind = Kind::Compare;
  p.column = std::move(column);
  p.op = op;
  p.literal = std::move(literal);
  return p;
}

Predicate Predicate::is_null(std::string column, bool negated) {
  Predicate p;
  p.kind = negated ? Kind::IsNotNull : Kind::IsNull;
  p.column = std::move(column);
  return p;
}

Predicate Predicate::conjunction(Predicate lhs, Predicate rhs) {
  Predicate p;
  p.kind = Kind::And;
  p.operands.push_back(std::move(lhs));
  p.operands.push_back(std::move(rhs));
  return p;
}

Predicate Predicate::disjunction(Predicate lhs, Predicate rhs) {
  Predicate p;
  p.kind = Kind::Or;
  p.operands.push_back(std::move(lhs));
  p.operands.push_back(std::move(rhs));
  return p;
}

Predicate Predicate::negation(Predicate operand) {
  Predicate p;
  p.kind = Kind::Not;
  p.operands.push_back(std::move(operand));
  return p;
}

QueryAst parse_query(std::string_view text) { return Parser(lex(text)).parse(); }

std::string render_query(const QueryAst& ast) {
  std::string out = "SELECT ";
  if (ast.star) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < ast.projection.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_column(ast.projection[i]);
    }
  }
  if (ast.predicate) out += " WHERE " + render_predicate(*ast.predicate);
  if (ast.limit) out += " LIMIT " + std::to_string(*ast.limit);
  return out;
}

QueryResult execute_query(const QueryAst& ast, const ColumnTable& table) {
  std::vector<std::size_t> projection;
  if (ast.star) {
    for (std::size_t i = 0; i < table.column_count(); ++i) projection.push_back(i);
  } else {
    for (const auto& name : ast.projection) projection.push_back(resolve(table, name));
  }
  std::optional<Bound> predicate;
  if (ast.predicate) predicate = bind(*ast.predicate, table);

  QueryResult result;
  for (auto idx : projection) result.columns.push_back(table.column(idx).name());
  const std::size_t limit = ast.limit.value_or(kDefaultLimit);
  for (std::size_t r = 0; r < table.row_count() && result.rows.size() < limit; ++r) {
    if (predicate && eval(*predicate, table, r) != Tri::True) continue;
    Row row;
    row.reserve(projection.size());
    for (auto idx : projection) row.push_back(table.column(idx)[r]);
    result.row_indices.push_back(r);
    result.rows.push_back(std::move(row));
  }
  return result;
}

QueryResult run_query(std::string_view text, const ColumnTable& table) {
  return execute_query(parse_query(text), table);
}

}  // namespace cocoon::query
