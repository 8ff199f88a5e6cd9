#pragma once

#include <json.hpp>

#include "cocoon/table.hpp"

namespace cocoon {

// Insertion-ordered so serialized documents have a stable, meaningful key order.
using Json = nlohmann::ordered_json;

// Scalars map to JSON natively; dates and timestamps as ISO strings; Null as null.
Json to_json(const Value& v);
Json to_json(const Row& row);
// Row as an object keyed by column name.
Json row_object(const ColumnTable& table, const Row& row);

}  // namespace cocoon
