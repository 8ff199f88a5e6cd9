#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cocoon/table.hpp"

namespace cocoon {

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
};

// Picks the most specific type in the order boolean, integer, float, date,
// timestamp, string that parses every value. `raw` must exclude null cells.
PrimitiveType infer_primitive_type(std::span<const std::string> raw);

// Only the empty cell maps to Null; every other token is kept as a value.
ColumnTable load_csv(const std::filesystem::path& path, std::string table_name,
                     const CsvOptions& options = {});
ColumnTable parse_csv(std::string_view text, std::string table_name,
                      const CsvOptions& options = {});

// Writes canonical text that parse_csv reads back into an identical table.
std::string write_csv(const ColumnTable& table, const CsvOptions& options = {});

// First min(n, row_count) rows in file order.
std::vector<Row> sample_rows(const ColumnTable& table, std::size_t n);

}  // namespace cocoon
