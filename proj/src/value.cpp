#include "cocoon/value.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace cocoon {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (fold(a[i]) != fold(b[i])) return false;
  }
  return true;
}

// Reads exactly `n` digits at `pos`.
bool read_fixed(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = s[pos + i];
    if (!is_digit(c)) return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (m == 2 && is_leap(y)) ? 29u : kDays[m - 1];
}

std::optional<Date> parse_date_prefix(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || !read_fixed(s, 0, 4, y) || s[4] != '-' || !read_fixed(s, 5, 2, m) ||
      s[7] != '-' || !read_fixed(s, 8, 2, d)) {
    return std::nullopt;
  }
  if (m < 1 || m > 12 || d < 1 || static_cast<unsigned>(d) > days_in_month(y, m)) {
    return std::nullopt;
  }
  return Date{days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d))};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string_view to_string(PrimitiveType type) {
  switch (type) {
    case PrimitiveType::Boolean: return "boolean";
    case PrimitiveType::Integer: return "integer";
    case PrimitiveType::Float: return "float";
    case PrimitiveType::String: return "string";
    case PrimitiveType::Date: return "date";
    case PrimitiveType::Timestamp: return "timestamp";
  }
  return "string";
}

std::optional<PrimitiveType> primitive_type_from_string(std::string_view name) {
  for (auto t : {PrimitiveType::Boolean, PrimitiveType::Integer, PrimitiveType::Float,
                 PrimitiveType::String, PrimitiveType::Date, PrimitiveType::Timestamp}) {
    if (iequals(name, to_string(t))) return t;
  }
  return std::nullopt;
}

bool is_numeric(PrimitiveType type) {
  return type == PrimitiveType::Integer || type == PrimitiveType::Float;
}

bool is_ordered_scalar(PrimitiveType type) {
  return is_numeric(type) || type == PrimitiveType::Date || type == PrimitiveType::Timestamp;
}

std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp < 10 ? mp + 3 : mp - 9;
  year = y + (month <= 2);
}

std::optional<bool> parse_boolean(std::string_view text) {
  if (iequals(text, "true")) return true;
  if (iequals(text, "false")) return false;
  return std::nullopt;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  if (i == text.size()) return std::nullopt;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!is_digit(text[j])) return std::nullopt;
  }
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return out;
}

std::optional<double> parse_float(std::string_view text) {
  // -?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?
  std::size_t i = 0;
  const std::size_t n = text.size();
  if (i < n && text[i] == '-') ++i;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < n && is_digit(text[i])) ++i, ++int_digits;
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && is_digit(text[i])) ++i, ++frac_digits;
  }
  if (int_digits == 0 && frac_digits == 0) return std::nullopt;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < n && is_digit(text[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != n) return std::nullopt;
  double out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + n, out);
  if (ec != std::errc() || ptr != text.data() + n || !std::isfinite(out)) return std::nullopt;
  return out;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  return parse_date_prefix(text);
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  // YYYY-MM-DD[T ]HH:MM[:SS[.f{1,9}]][Z|+HH[:MM]|-HH[:MM]]
  const auto date = parse_date_prefix(s);
  if (!date || s.size() < 16) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!read_fixed(s, 11, 2, hh) || s[13] != ':' || !read_fixed(s, 14, 2, mm)) return std::nullopt;
  std::size_t pos = 16;
  std::int64_t micros = 0;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_fixed(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      std::int64_t scale = 100000;
      while (pos < s.size() && is_digit(s[pos])) {
        if (digits < 6) {
          micros += (s[pos] - '0') * scale;
          scale /= 10;
        }
        ++digits;
        ++pos;
      }
      if (digits == 0 || digits > 9) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  std::int64_t offset_minutes = 0;
  if (pos < s.size()) {
    const char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      if (!read_fixed(s, pos + 1, 2, oh)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size()) {
        if (!read_fixed(s, pos, 2, om)) return std::nullopt;
        pos += 2;
      }
      if (oh > 23 || om > 59) return std::nullopt;
      offset_minutes = (oh * 60 + om) * (c == '-' ? -1 : 1);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  const std::int64_t seconds = static_cast<std::int64_t>(date->days) * 86400 + hh * 3600 +
                               mm * 60 + ss - offset_minutes * 60;
  return Timestamp{seconds * 1000000 + micros};
}

std::optional<Value> parse_as(std::string_view text, PrimitiveType type) {
  switch (type) {
    case PrimitiveType::Boolean:
      if (auto v = parse_boolean(text)) return Value{*v};
      return std::nullopt;
    case PrimitiveType::Integer:
      if (auto v = parse_integer(text)) return Value{*v};
      return std::nullopt;
    case PrimitiveType::Float:
      if (auto v = parse_float(text)) return Value{*v};
      return std::nullopt;
    case PrimitiveType::Date:
      if (auto v = parse_date(text)) return Value{*v};
      return std::nullopt;
    case PrimitiveType::Timestamp:
      if (auto v = parse_timestamp(text)) return Value{*v};
      return std::nullopt;
    case PrimitiveType::String:
      return Value{std::string(text)};
  }
  return std::nullopt;
}

std::string format_date(Date d) {
  int y = 0;
  unsigned m = 0, day = 0;
  civil_from_days(d.days, y, m, day);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, day);
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const std::int64_t secs = floor_div(t.micros, 1000000);
  const std::int64_t frac = t.micros - secs * 1000000;
  const std::int64_t days = floor_div(secs, 86400);
  const std::int64_t rem = secs - days * 86400;
  std::string out = format_date(Date{static_cast<std::int32_t>(days)});
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", static_cast<int>(rem / 3600),
                static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  out += buf;
  if (frac != 0) {
    std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(frac));
    std::string f = buf;
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  out += 'Z';
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  std::string out(buf.data(), ptr);
  if (out.find_first_of(".eEni") == std::string::npos) out += ".0";
  return out;
}

std::string to_text(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, Date>) {
          return format_date(x);
        } else {
          return format_timestamp(x);
        }
      },
      v);
}

std::optional<double> as_number(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  if (auto p = std::get_if<double>(&v)) return *p;
  if (auto p = std::get_if<Date>(&v)) return static_cast<double>(p->days);
  if (auto p = std::get_if<Timestamp>(&v)) return static_cast<double>(p->micros);
  return std::nullopt;
}

std::weak_ordering compare_values(const Value& a, const Value& b) {
  const bool a_num = std::holds_alternative<std::int64_t>(a) || std::holds_alternative<double>(a);
  const bool b_num = std::holds_alternative<std::int64_t>(b) || std::holds_alternative<double>(b);
  if (a_num && b_num && a.index() != b.index()) {
    const double x = *as_number(a), y = *as_number(b);
    if (x < y) return std::weak_ordering::less;
    if (x > y) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }
  if (a.index() != b.index()) return a.index() <=> b.index();
  return std::visit(
      [&b](const auto& x) -> std::weak_ordering {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, std::monostate>) {
          return std::weak_ordering::equivalent;
        } else if constexpr (std::is_same_v<T, double>) {
          if (x < y) return std::weak_ordering::less;
          if (x > y) return std::weak_ordering::greater;
          return std::weak_ordering::equivalent;
        } else if constexpr (std::is_same_v<T, std::string>) {
          const int c = x.compare(y);
          return c < 0 ? std::weak_ordering::less
                       : (c > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent);
        } else {
          return std::weak_order(x, y);
        }
      },
      a);
}

std::size_t ValueHash::operator()(const Value& v) const noexcept {
  const std::size_t seed = v.index() * 0x9e3779b97f4a7c15ULL;
  const std::size_t h = std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0;
        } else if constexpr (std::is_same_v<T, Date>) {
          return std::hash<std::int32_t>{}(x.days);
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          return std::hash<std::int64_t>{}(x.micros);
        } else if constexpr (std::is_same_v<T, double>) {
          return std::hash<double>{}(x == 0.0 ? 0.0 : x);
        } else {
          return std::hash<T>{}(x);
        }
      },
      v);
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace cocoon
