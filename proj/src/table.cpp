#include "cocoon/table.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "cocoon/errors.hpp"

namespace cocoon {

namespace {

bool holds_type(const Value& v, PrimitiveType t) {
  switch (t) {
    case PrimitiveType::Boolean: return std::holds_alternative<bool>(v);
    case PrimitiveType::Integer: return std::holds_alternative<std::int64_t>(v);
    case PrimitiveType::Float: return std::holds_alternative<double>(v);
    case PrimitiveType::String: return std::holds_alternative<std::string>(v);
    case PrimitiveType::Date: return std::holds_alternative<Date>(v);
    case PrimitiveType::Timestamp: return std::holds_alternative<Timestamp>(v);
  }
  return false;
}

void fnv(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= 0xff;
  h *= 1099511628211ULL;
}

}  // namespace

Column::Column(ColumnSchema schema, std::vector<Value> cells)
    : schema_(std::move(schema)), cells_(std::move(cells)) {
  for (const auto& v : cells_) {
    if (cocoon::is_null(v)) {
      ++null_count_;
    } else if (!holds_type(v, schema_.ptype)) {
      throw std::invalid_argument("column " + schema_.name + " holds a value that is not " +
                                  std::string(to_string(schema_.ptype)));
    }
  }
}

ColumnTable::ColumnTable(std::string name, std::vector<Column> columns, std::size_t rows)
    : name_(std::move(name)), columns_(std::move(columns)), row_count_(rows) {}

ColumnTable ColumnTable::make(std::string name, std::vector<Column> columns) {
  std::unordered_set<std::string> seen;
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    if (!seen.insert(c.name()).second) {
      throw std::invalid_argument("duplicate column name: " + c.name());
    }
    if (c.schema().ordinal != i) {
      throw std::invalid_argument("column ordinals must be contiguous from 0");
    }
    if (c.size() != rows) {
      throw std::invalid_argument("column " + c.name() + " length differs from row count");
    }
  }
  return ColumnTable(std::move(name), std::move(columns), rows);
}

std::vector<ColumnSchema> ColumnTable::schema() const {
  std::vector<ColumnSchema> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.schema());
  return out;
}

std::vector<std::string> ColumnTable::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

std::optional<std::size_t> ColumnTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name() == name) return i;
  }
  return std::nullopt;
}

const Column& ColumnTable::column(std::string_view name) const {
  if (auto idx = find_column(name)) return columns_[*idx];
  throw UnknownColumn(std::string(name));
}

Row ColumnTable::row(std::size_t index) const {
  Row out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c[index]);
  return out;
}

std::uint64_t ColumnTable::content_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  fnv(h, name_);
  for (const auto& c : columns_) {
    fnv(h, c.name());
    fnv(h, to_string(c.type()));
    for (const auto& v : c.cells()) {
      fnv(h, cocoon::is_null(v) ? std::string_view("\x01null") : std::string_view(to_text(v)));
    }
  }
  return h;
}

}  // namespace cocoon
