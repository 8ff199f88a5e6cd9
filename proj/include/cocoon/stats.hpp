#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cocoon/table.hpp"

namespace cocoon::stats {

inline constexpr std::string_view kOtherBucket = "<other>";
inline constexpr double kDefaultCoverage = 0.9;
inline constexpr std::size_t kDefaultFrequencyCap = 50;

// What a column-level measurement runs over: one column, or several columns
// treated as a single tuple-valued column (a tuple is null if any member is).
struct Target {
  std::string name;
  std::vector<std::size_t> columns;

  bool is_tuple() const noexcept { return columns.size() > 1; }
  bool operator==(const Target&) const = default;
};

Target column_target(const ColumnTable& table, std::string_view column);
Target tuple_target(const ColumnTable& table, std::span<const std::string> columns);
// Tuple targets are named by joining member names with '+'.
std::string tuple_name(std::span<const std::string> columns);

struct DuplicateGroup {
  Row row;
  std::size_t count = 0;
};

struct DuplicationStats {
  bool has_duplicate = false;
  std::vector<DuplicateGroup> sample_duplicate;  // up to 5, count >= 2
};

struct TypeStats {
  PrimitiveType current_type = PrimitiveType::String;
  std::vector<Value> sample_value;  // up to 10 distinct, file order
};

struct UniquenessStats {
  double unique_ratio = 1.0;
  std::size_t distinct = 0;
  std::size_t non_null = 0;
  std::vector<std::string> sample_non_unique;  // up to 5, count >= 2
};

enum class DmvRule { Sentinel, Syntactic, Extreme };
std::string_view to_string(DmvRule rule);

struct DmvCandidate {
  Value value;
  std::size_t frequency = 0;
  DmvRule rule = DmvRule::Sentinel;
};

struct DmvStats {
  std::vector<DmvCandidate> candidate_dmv;
};

struct MissingStats {
  double missing_fraction = 0.0;
  std::size_t null_count = 0;
  std::size_t row_count = 0;
  std::vector<Row> sample_missing;  // up to 5 full rows
};

struct NumericStats {
  std::array<double, 5> quantile{};
};

struct StringStats {
  std::optional<std::string> regex_pattern;
  std::vector<std::string> sample_outlier;  // up to 5 distinct non-matching
  std::vector<std::string> sample_inlier;   // up to 5 distinct matching
  double coverage = 0.0;                    // fraction of values the pattern matches
  std::size_t outlier_count = 0;
};

struct FrequencyStats {
  std::vector<std::pair<std::string, std::size_t>> value_freq;  // descending count
};

using StatPayload = std::variant<DuplicationStats, TypeStats, UniquenessStats, DmvStats,
                                 MissingStats, NumericStats, StringStats, FrequencyStats>;

// Groups rows by the full tuple; Null groups with Null.
DuplicationStats profile_duplicates(const ColumnTable& table);

TypeStats profile_column_type(const ColumnTable& table, std::string_view column);

// Distinct non-null values over non-null rows. Throws EmptyColumn when all null.
UniquenessStats profile_uniqueness(const ColumnTable& table, const Target& target);
UniquenessStats profile_uniqueness(const ColumnTable& table, std::string_view column);

// Simplified disguised-missing-value detection, three rules:
//   sentinel  - trimmed, case-folded text is a known placeholder token
//   syntactic - value fails the induced pattern yet occurs >= max(2, 1% of rows)
//   extreme   - ordered value at the column min or max occurring more than
//               5x the median frequency of distinct values
// A value firing several rules is tagged with the first of sentinel, extreme, syntactic.
DmvStats detect_candidate_dmvs(const ColumnTable& table, std::string_view column,
                               const StringStats* induced = nullptr);
bool is_sentinel_token(std::string_view text);

MissingStats profile_missing(const ColumnTable& table, const Target& target);
MissingStats profile_missing(const ColumnTable& table, std::string_view column);

// [min, Q1, median, Q3, max] with linear interpolation at rank (n-1)p.
NumericStats compute_quantiles(const ColumnTable& table, std::string_view column);
std::array<double, 5> quantiles_of(std::vector<double> values);

// Token-alignment pattern induction; `coverage` must lie in (0.5, 1].
StringStats induce_regex_pattern(std::span<const std::string> values,
                                 double coverage = kDefaultCoverage);

FrequencyStats compute_value_frequency(const ColumnTable& table, std::string_view column,
                                       std::size_t cap = kDefaultFrequencyCap);

// distinct <= 100 and distinct / non-null <= 0.2, for string and integer columns.
bool is_categorical(const ColumnTable& table, std::string_view column);

// Non-null cells of a column in canonical text form, file order.
std::vector<std::string> text_values(const ColumnTable& table, std::string_view column);

}  // namespace cocoon::stats
