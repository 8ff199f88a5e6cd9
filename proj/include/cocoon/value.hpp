#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace cocoon {

enum class PrimitiveType { Boolean, Integer, Float, String, Date, Timestamp };

std::string_view to_string(PrimitiveType type);
std::optional<PrimitiveType> primitive_type_from_string(std::string_view name);

bool is_numeric(PrimitiveType type);
// Numeric plus date/timestamp: types with a meaningful total order on a number line.
bool is_ordered_scalar(PrimitiveType type);

// Calendar date as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;
  auto operator<=>(const Date&) const = default;
};

// UTC instant as microseconds since the Unix epoch.
struct Timestamp {
  std::int64_t micros = 0;
  auto operator<=>(const Timestamp&) const = default;
};

// A tagged scalar. std::monostate is Null; Null equals only Null.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string, Date, Timestamp>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Canonical text form. Null renders as the empty string. Floats always carry a
// '.' or an exponent so the text re-infers as float.
std::string to_text(const Value& v);

// Numeric projection used for quantiles, histograms and extreme detection:
// integers and floats as themselves, dates as days, timestamps as microseconds.
std::optional<double> as_number(const Value& v);

// Total order for non-null values of the same alternative. Values of different
// alternatives order by their alternative index; integer and float compare numerically.
std::weak_ordering compare_values(const Value& a, const Value& b);

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept;
};

// Strict parsers used by type inference and literal binding. Each accepts the
// whole input or nothing.
std::optional<bool> parse_boolean(std::string_view text);
std::optional<std::int64_t> parse_integer(std::string_view text);
std::optional<double> parse_float(std::string_view text);
std::optional<Date> parse_date(std::string_view text);
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Parses text as the given type; nullopt when it does not parse. String always parses.
std::optional<Value> parse_as(std::string_view text, PrimitiveType type);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);
std::string format_double(double x);

// Days from civil date (proleptic Gregorian), and back.
std::int32_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int32_t days, int& year, unsigned& month, unsigned& day);

}  // namespace cocoon
