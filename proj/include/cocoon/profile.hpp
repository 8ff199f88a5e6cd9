#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cocoon/json.hpp"
#include "cocoon/stats.hpp"
#include "cocoon/table.hpp"

namespace cocoon {

// One row of the error taxonomy. Order matches the alternatives of StatPayload.
enum class ErrorKind {
  Duplication,
  ColumnType,
  UniqueKey,
  Dmv,
  MissingValue,
  NumericOutlier,
  StringOutlier,
  MissingRecord,
};

inline constexpr std::array<ErrorKind, 8> kAllErrorKinds = {
    ErrorKind::Duplication,  ErrorKind::ColumnType,     ErrorKind::UniqueKey,
    ErrorKind::Dmv,          ErrorKind::MissingValue,   ErrorKind::NumericOutlier,
    ErrorKind::StringOutlier, ErrorKind::MissingRecord,
};

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> error_kind_from_string(std::string_view name);

ErrorKind kind_of(const stats::StatPayload& payload);

// The table itself as a target: named after the table, no member columns.
stats::Target table_target(const ColumnTable& table);

// Whether `kind` is meaningful for `target`:
//   Duplication     table only
//   UniqueKey       any column or tuple with at least one non-null value
//   MissingValue    any column or tuple
//   ColumnType, Dmv any single column
//   NumericOutlier  integer/float columns with a non-null value
//   StringOutlier   string columns with a non-null value
//   MissingRecord   boolean or categorical columns
bool kind_applies(ErrorKind kind, const ColumnTable& table, const stats::Target& target);

// Runs the statistical measurement for one kind. Throws KindNotApplicable.
stats::StatPayload compute_stat(ErrorKind kind, const ColumnTable& table,
                                const stats::Target& target);

// Serialized with the taxonomy's field names (HasDuplicate, UniqueRatio, ...).
Json stat_to_json(const stats::StatPayload& payload, const ColumnTable& table);

}  // namespace cocoon
