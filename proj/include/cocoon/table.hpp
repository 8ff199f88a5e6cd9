#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cocoon/value.hpp"

namespace cocoon {

struct ColumnSchema {
  std::string name;
  std::size_t ordinal = 0;
  PrimitiveType ptype = PrimitiveType::String;

  bool operator==(const ColumnSchema&) const = default;
};

// One typed column. Every cell holds either Null or a value of `schema().ptype`.
class Column {
 public:
  Column(ColumnSchema schema, std::vector<Value> cells);

  const ColumnSchema& schema() const noexcept { return schema_; }
  const std::string& name() const noexcept { return schema_.name; }
  PrimitiveType type() const noexcept { return schema_.ptype; }
  std::size_t size() const noexcept { return cells_.size(); }
  std::size_t null_count() const noexcept { return null_count_; }
  std::size_t non_null_count() const noexcept { return cells_.size() - null_count_; }

  bool is_null(std::size_t row) const { return cocoon::is_null(cells_[row]); }
  const Value& operator[](std::size_t row) const { return cells_[row]; }
  const std::vector<Value>& cells() const noexcept { return cells_; }

  bool operator==(const Column& other) const {
    return schema_ == other.schema_ && cells_ == other.cells_;
  }

 private:
  ColumnSchema schema_;
  std::vector<Value> cells_;
  std::size_t null_count_ = 0;
};

using Row = std::vector<Value>;

// Immutable in-memory columnar table. Construct through ColumnTable::make,
// which enforces unique names, contiguous ordinals and equal column lengths.
class ColumnTable {
 public:
  static ColumnTable make(std::string name, std::vector<Column> columns);

  const std::string& name() const noexcept { return name_; }
  std::size_t row_count() const noexcept { return row_count_; }
  std::size_t column_count() const noexcept { return columns_.size(); }

  std::vector<ColumnSchema> schema() const;
  std::vector<std::string> column_names() const;

  const Column& column(std::size_t ordinal) const { return columns_.at(ordinal); }
  // Throws UnknownColumn.
  const Column& column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  Row row(std::size_t index) const;
  const std::vector<Column>& columns() const noexcept { return columns_; }

  // FNV-1a over schema and canonical cell text; equal tables hash equally.
  std::uint64_t content_hash() const;

  bool operator==(const ColumnTable& other) const {
    return name_ == other.name_ && row_count_ == other.row_count_ && columns_ == other.columns_;
  }

 private:
  ColumnTable(std::string name, std::vector<Column> columns, std::size_t rows);

  std::string name_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

}  // namespace cocoon
