#include "cocoon/profile.hpp"

#include "cocoon/errors.hpp"

namespace cocoon {

namespace {

Json rows_json(const ColumnTable& table, const std::vector<Row>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(row_object(table, r));
  return out;
}

const ColumnSchema& single_column(const ColumnTable& table, const stats::Target& target) {
  return table.column(target.columns.front()).schema();
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Duplication: return "Duplication";
    case ErrorKind::ColumnType: return "ColumnType";
    case ErrorKind::UniqueKey: return "UniqueKey";
    case ErrorKind::Dmv: return "Dmv";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::NumericOutlier: return "NumericOutlier";
    case ErrorKind::StringOutlier: return "StringOutlier";
    case ErrorKind::MissingRecord: return "MissingRecord";
  }
  return "Duplication";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view name) {
  for (auto k : kAllErrorKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ErrorKind kind_of(const stats::StatPayload& payload) {
  return kAllErrorKinds[payload.index()];
}

stats::Target table_target(const ColumnTable& table) { return {table.name(), {}}; }

bool kind_applies(ErrorKind kind, const ColumnTable& table, const stats::Target& target) {
  if (target.columns.empty()) return kind == ErrorKind::Duplication;
  if (kind == ErrorKind::Duplication) return false;
  if (target.is_tuple()) {
    if (kind == ErrorKind::MissingValue) return true;
    if (kind == ErrorKind::UniqueKey) {
      return stats::profile_missing(table, target).null_count < table.row_count();
    }
    return false;
  }
  const auto& col = table.column(target.columns.front());
  const auto& schema = single_column(table, target);
  const bool has_values = col.non_null_count() > 0;
  switch (kind) {
    case ErrorKind::ColumnType:
    case ErrorKind::Dmv:
    case ErrorKind::MissingValue:
      return true;
    case ErrorKind::UniqueKey:
      return has_values;
    case ErrorKind::NumericOutlier:
      return has_values && is_numeric(schema.ptype);
    case ErrorKind::StringOutlier:
      return has_values && schema.ptype == PrimitiveType::String;
    case ErrorKind::MissingRecord:
      return has_values && (schema.ptype == PrimitiveType::Boolean ||
                            stats::is_categorical(table, schema.name));
    case ErrorKind::Duplication:
      return false;
  }
  return false;
}

stats::StatPayload compute_stat(ErrorKind kind, const ColumnTable& table,
                                const stats::Target& target) {
  if (!kind_applies(kind, table, target)) {
    throw KindNotApplicable(std::string(to_string(kind)) + " does not apply to " + target.name);
  }
  const std::string column =
      target.columns.empty() ? std::string() : single_column(table, target).name;
  switch (kind) {
    case ErrorKind::Duplication:
      return stats::profile_duplicates(table);
    case ErrorKind::ColumnType:
      return stats::profile_column_type(table, column);
    case ErrorKind::UniqueKey:
      return stats::profile_uniqueness(table, target);
    case ErrorKind::Dmv: {
      if (single_column(table, target).ptype == PrimitiveType::String) {
        const auto values = stats::text_values(table, column);
        const auto induced = stats::induce_regex_pattern(values);
        return stats::detect_candidate_dmvs(table, column, &induced);
      }
      return stats::detect_candidate_dmvs(table, column);
    }
    case ErrorKind::MissingValue:
      return stats::profile_missing(table, target);
    case ErrorKind::NumericOutlier:
      return stats::compute_quantiles(table, column);
    case ErrorKind::StringOutlier:
      return stats::induce_regex_pattern(stats::text_values(table, column));
    case ErrorKind::MissingRecord:
      return stats::compute_value_frequency(table, column);
  }
  throw KindNotApplicable("unknown kind");
}

Json stat_to_json(const stats::StatPayload& payload, const ColumnTable& table) {
  return std::visit(
      [&](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        Json j = Json::object();
        if constexpr (std::is_same_v<T, stats::DuplicationStats>) {
          j["HasDuplicate"] = p.has_duplicate;
          Json sample = Json::array();
          for (const auto& g : p.sample_duplicate) {
            sample.push_back({{"row", row_object(table, g.row)}, {"count", g.count}});
          }
          j["SampleDuplicate"] = std::move(sample);
        } else if constexpr (std::is_same_v<T, stats::TypeStats>) {
          j["CurrentType"] = std::string(to_string(p.current_type));
          Json sample = Json::array();
          for (const auto& v : p.sample_value) sample.push_back(to_json(v));
          j["SampleValue"] = std::move(sample);
        } else if constexpr (std::is_same_v<T, stats::UniquenessStats>) {
          j["UniqueRatio"] = p.unique_ratio;
          j["DistinctCount"] = p.distinct;
          j["NonNullCount"] = p.non_null;
          j["SampleNonUnique"] = p.sample_non_unique;
        } else if constexpr (std::is_same_v<T, stats::DmvStats>) {
          Json list = Json::array();
          for (const auto& c : p.candidate_dmv) {
            list.push_back({{"value", to_json(c.value)},
                            {"frequency", c.frequency},
                            {"rule", std::string(stats::to_string(c.rule))}});
          }
          j["CandidateDMV"] = std::move(list);
        } else if constexpr (std::is_same_v<T, stats::MissingStats>) {
          // Percentage from the counts directly: 817 of 1000 gives exactly 81.7.
          j["MissingPercentage"] =
              p.row_count == 0 ? 0.0 : static_cast<double>(p.null_count) * 100.0 /
                                           static_cast<double>(p.row_count);
          j["MissingFraction"] = p.missing_fraction;
          j["NullCount"] = p.null_count;
          j["RowCount"] = p.row_count;
          j["SampleMissing"] = rows_json(table, p.sample_missing);
        } else if constexpr (std::is_same_v<T, stats::NumericStats>) {
          j["Quantile"] = p.quantile;
        } else if constexpr (std::is_same_v<T, stats::StringStats>) {
          j["RegexPattern"] = p.regex_pattern ? Json(*p.regex_pattern) : Json(nullptr);
          j["SampleOutlier"] = p.sample_outlier;
          j["SampleInlier"] = p.sample_inlier;
          j["Coverage"] = p.coverage;
          j["OutlierCount"] = p.outlier_count;
        } else {
          Json freq = Json::object();
          for (const auto& [value, count] : p.value_freq) freq[value] = count;
          j["ValueFreq"] = std::move(freq);
        }
        return j;
      },
      payload);
}

}  // namespace cocoon
