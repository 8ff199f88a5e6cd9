#include "cocoon/json.hpp"

namespace cocoon {

Json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Date> || std::is_same_v<T, Timestamp>) {
          return to_text(Value{x});
        } else {
          return x;
        }
      },
      v);
}

Json to_json(const Row& row) {
  Json out = Json::array();
  for (const auto& v : row) out.push_back(to_json(v));
  return out;
}

Json row_object(const ColumnTable& table, const Row& row) {
  Json out = Json::object();
  for (std::size_t c = 0; c < row.size() && c < table.column_count(); ++c) {
    out[table.column(c).name()] = to_json(row[c]);
  }
  return out;
}

}  // namespace cocoon
