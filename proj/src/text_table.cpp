#include "cocoon/text_table.hpp"

#include <algorithm>

namespace cocoon {

namespace {

std::string cell_text(const Value& v, std::size_t max_cell) {
  if (is_null(v)) return "NULL";
  std::string s = to_text(v);
  for (auto& c : s) {
    if (c == '\n' || c == '\r' || c == '|') c = ' ';
  }
  if (s.size() > max_cell) s = s.substr(0, max_cell - 3) + "...";
  return s;
}

}  // namespace

std::string render_text_table(std::span<const std::string> columns, std::span<const Row> rows,
                              std::size_t max_cell) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  for (const auto& row : rows) {
    auto& line = cells.emplace_back();
    for (std::size_t c = 0; c < columns.size() && c < row.size(); ++c) {
      line.push_back(cell_text(row[c], max_cell));
      width[c] = std::max(width[c], line.back().size());
    }
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string out = "|";
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& s = c < line.size() ? line[c] : std::string();
      out += " " + s + std::string(width[c] - s.size(), ' ') + " |";
    }
    return out + "\n";
  };
  std::string out = emit(std::vector<std::string>(columns.begin(), columns.end()));
  out += "|";
  for (auto w : width) out += std::string(w + 2, '-') + "|";
  out += "\n";
  for (const auto& line : cells) out += emit(line);
  return out;
}

std::string render_projection(const ColumnTable& table, std::span<const std::string> columns,
                              std::size_t n) {
  std::vector<Row> rows;
  const std::size_t k = std::min(n, table.row_count());
  for (std::size_t r = 0; r < k; ++r) {
    Row row;
    for (const auto& c : columns) row.push_back(table.column(c)[r]);
    rows.push_back(std::move(row));
  }
  return render_text_table(columns, rows);
}

}  // namespace cocoon
