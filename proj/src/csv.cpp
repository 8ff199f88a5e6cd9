#include "cocoon/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cocoon/errors.hpp"

namespace cocoon {

namespace {

struct RawRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical record index
};

// RFC-4180 tokenizer. Quoted fields may span lines; "" inside quotes is a quote.
std::vector<RawRecord> tokenize(std::string_view text, char delim) {
  std::vector<RawRecord> records;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  RawRecord current;
  current.line = 1;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool after_quote = false;  // closing quote seen; only delimiter or EOL may follow
  bool record_has_content = false;
  std::size_t record_no = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
    after_quote = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = RawRecord{};
    current.line = ++record_no;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == delim) {
      end_field();
      record_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else if (after_quote) {
      throw ParseError(current.line, current.fields.size() + 1,
                       "unexpected character after closing quote");
    } else if (c == '"') {
      if (!field.empty()) {
        throw ParseError(current.line, current.fields.size() + 1,
                         "quote inside unquoted field");
      }
      in_quotes = true;
      field_was_quoted = true;
      record_has_content = true;
    } else {
      field.push_back(c);
      record_has_content = true;
    }
  }
  if (in_quotes) {
    throw ParseError(current.line, current.fields.size() + 1, "unterminated quoted field");
  }
  if (record_has_content || !field.empty() || field_was_quoted || after_quote) {
    end_record();
  }
  return records;
}

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find_first_of(std::string{delim, '"', '\r', '\n'}) == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

PrimitiveType infer_primitive_type(std::span<const std::string> raw) {
  if (raw.empty()) return PrimitiveType::String;
  for (auto t : {PrimitiveType::Boolean, PrimitiveType::Integer, PrimitiveType::Float,
                 PrimitiveType::Date, PrimitiveType::Timestamp}) {
    const bool all = std::all_of(raw.begin(), raw.end(),
                                 [t](const std::string& s) { return parse_as(s, t).has_value(); });
    if (all) return t;
  }
  return PrimitiveType::String;
}

ColumnTable parse_csv(std::string_view text, std::string table_name, const CsvOptions& options) {
  auto records = tokenize(text, options.delimiter);

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.header) {
    if (records.empty()) throw ParseError(1, 1, "missing header row");
    names = records.front().fields;
    first_data = 1;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) names[i] = "column_" + std::to_string(i);
      if (!seen.insert(names[i]).second) {
        throw ParseError(1, i + 1, "duplicate column name '" + names[i] + "'");
      }
    }
  } else if (!records.empty()) {
    for (std::size_t i = 0; i < records.front().fields.size(); ++i) {
      names.push_back("column_" + std::to_string(i));
    }
  }

  const std::size_t width = names.size();
  std::vector<std::vector<std::string>> raw(width);
  std::vector<std::vector<bool>> null_mask(width);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (width > 1 && rec.fields.size() == 1 && rec.fields.front().empty()) continue;
    if (rec.fields.size() != width) {
      throw ParseError(rec.line, std::min(rec.fields.size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(rec.fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      null_mask[c].push_back(rec.fields[c].empty());
      raw[c].push_back(rec.fields[c]);
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    std::vector<std::string> present;
    for (std::size_t r = 0; r < raw[c].size(); ++r) {
      if (!null_mask[c][r]) present.push_back(raw[c][r]);
    }
    const PrimitiveType type = infer_primitive_type(present);
    std::vector<Value> cells;
    cells.reserve(raw[c].size());
    for (std::size_t r = 0; r < raw[c].size(); ++r) {
      cells.push_back(null_mask[c][r] ? Value{} : *parse_as(raw[c][r], type));
    }
    columns.emplace_back(ColumnSchema{names[c], c, type}, std::move(cells));
  }
  return ColumnTable::make(std::move(table_name), std::move(columns));
}

ColumnTable load_csv(const std::filesystem::path& path, std::string table_name,
                     const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return parse_csv(buf.str(), std::move(table_name), options);
}

std::string write_csv(const ColumnTable& table, const CsvOptions& options) {
  std::string out;
  const char d = options.delimiter;
  if (options.header) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      if (c > 0) out += d;
      out += quote_if_needed(table.column(c).name(), d);
    }
    out += '\n';
  }
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      if (c > 0) out += d;
      const auto& v = table.column(c)[r];
      if (!is_null(v)) out += quote_if_needed(to_text(v), d);
    }
    out += '\n';
  }
  return out;
}

std::vector<Row> sample_rows(const ColumnTable& table, std::size_t n) {
  std::vector<Row> rows;
  const std::size_t k = std::min(n, table.row_count());
  rows.reserve(k);
  for (std::size_t r = 0; r < k; ++r) rows.push_back(table.row(r));
  return rows;
}

}  // namespace cocoon
