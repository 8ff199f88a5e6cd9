#include "cocoon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cocoon/errors.hpp"

namespace cocoon::stats {

namespace {

struct RowHash {
  std::size_t operator()(const Row& row) const noexcept {
    std::size_t h = row.size();
    ValueHash vh;
    for (const auto& v : row) h ^= vh(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct Tally {
  std::size_t count = 0;
  std::size_t first = 0;
};

// Orders tallied keys by descending count, then first occurrence.
template <class Map>
std::vector<typename Map::const_iterator> by_count(const Map& m) {
  std::vector<typename Map::const_iterator> out;
  out.reserve(m.size());
  for (auto it = m.begin(); it != m.end(); ++it) out.push_back(it);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (a->second.count != b->second.count) return a->second.count > b->second.count;
    return a->second.first < b->second.first;
  });
  return out;
}

Row tuple_at(const ColumnTable& t, const Target& target, std::size_t r) {
  Row key;
  key.reserve(target.columns.size());
  for (auto c : target.columns) key.push_back(t.column(c)[r]);
  return key;
}

bool tuple_null(const ColumnTable& t, const Target& target, std::size_t r) {
  return std::any_of(target.columns.begin(), target.columns.end(),
                     [&](std::size_t c) { return t.column(c).is_null(r); });
}

std::string tuple_text(const Row& key) {
  if (key.size() == 1) return to_text(key.front());
  std::string out = "(";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_text(key[i]);
  }
  return out + ")";
}

std::string fold_trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

double median_of(std::vector<std::size_t> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return static_cast<double>(xs[n / 2]);
  return (static_cast<double>(xs[n / 2 - 1]) + static_cast<double>(xs[n / 2])) / 2.0;
}

}  // namespace

std::string_view to_string(DmvRule rule) {
  switch (rule) {
    case DmvRule::Sentinel: return "sentinel";
    case DmvRule::Syntactic: return "syntactic";
    case DmvRule::Extreme: return "extreme";
  }
  return "sentinel";
}

Target column_target(const ColumnTable& table, std::string_view column) {
  const auto idx = table.find_column(column);
  if (!idx) throw UnknownColumn(std::string(column));
  return Target{std::string(column), {*idx}};
}

std::string tuple_name(std::span<const std::string> columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out += '+';
    out += columns[i];
  }
  return out;
}

Target tuple_target(const ColumnTable& table, std::span<const std::string> columns) {
  if (columns.empty()) throw std::invalid_argument("empty target");
  Target t{tuple_name(columns), {}};
  for (const auto& c : columns) {
    const auto idx = table.find_column(c);
    if (!idx) throw UnknownColumn(c);
    t.columns.push_back(*idx);
  }
  return t;
}

std::vector<std::string> text_values(const ColumnTable& table, std::string_view column) {
  const Column& col = table.column(column);
  std::vector<std::string> out;
  out.reserve(col.non_null_count());
  for (const auto& v : col.cells()) {
    if (!is_null(v)) out.push_back(to_text(v));
  }
  return out;
}

DuplicationStats profile_duplicates(const ColumnTable& table) {
  std::unordered_map<Row, Tally, RowHash> groups;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    auto [it, inserted] = groups.try_emplace(table.row(r), Tally{0, r});
    ++it->second.count;
  }
  DuplicationStats out;
  for (auto it : by_count(groups)) {
    if (it->second.count < 2) break;
    out.has_duplicate = true;
    if (out.sample_duplicate.size() < 5) out.sample_duplicate.push_back({it->first, it->second.count});
  }
  return out;
}

TypeStats profile_column_type(const ColumnTable& table, std::string_view column) {
  const Column& col = table.column(column);
  TypeStats out;
  out.current_type = col.type();
  std::unordered_set<Value, ValueHash> seen;
  for (const auto& v : col.cells()) {
    if (out.sample_value.size() >= 10) break;
    if (!is_null(v) && seen.insert(v).second) out.sample_value.push_back(v);
  }
  return out;
}

UniquenessStats profile_uniqueness(const ColumnTable& table, const Target& target) {
  std::unordered_map<Row, Tally, RowHash> counts;
  std::size_t non_null = 0;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (tuple_null(table, target, r)) continue;
    ++non_null;
    auto [it, inserted] = counts.try_emplace(tuple_at(table, target, r), Tally{0, r});
    ++it->second.count;
  }
  if (non_null == 0) throw EmptyColumn("column " + target.name + " has no non-null values");
  UniquenessStats out;
  out.non_null = non_null;
  out.distinct = counts.size();
  out.unique_ratio = static_cast<double>(counts.size()) / static_cast<double>(non_null);
  for (auto it : by_count(counts)) {
    if (it->second.count < 2 || out.sample_non_unique.size() >= 5) break;
    out.sample_non_unique.push_back(tuple_text(it->first));
  }
  return out;
}

UniquenessStats profile_uniqueness(const ColumnTable& table, std::string_view column) {
  return profile_uniqueness(table, column_target(table, column));
}

bool is_sentinel_token(std::string_view text) {
  static const std::unordered_set<std::string> kSentinels = {
      "-",    "--",      "n/a",     "na",   "none",       "null",
      "?",    "#value!", "unknown", "missing", "9999",   "-1",
      "1970-01-01", "1970-01-01t00:00:00z"};
  return kSentinels.count(fold_trim(text)) > 0;
}

DmvStats detect_candidate_dmvs(const ColumnTable& table, std::string_view column,
                               const StringStats* induced) {
  const Column& col = table.column(column);
  std::unordered_map<Value, Tally, ValueHash> counts;
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (col.is_null(r)) continue;
    auto [it, inserted] = counts.try_emplace(col[r], Tally{0, r});
    ++it->second.count;
  }

  std::optional<std::regex> pattern;
  if (induced && induced->regex_pattern) pattern.emplace(*induced->regex_pattern);
  const double syntactic_floor = std::max(2.0, 0.01 * static_cast<double>(table.row_count()));

  std::optional<Value> lo, hi;
  double extreme_floor = 0.0;
  if (is_ordered_scalar(col.type()) && !counts.empty()) {
    std::vector<std::size_t> freqs;
    freqs.reserve(counts.size());
    for (const auto& [v, tally] : counts) {
      freqs.push_back(tally.count);
      if (!lo || compare_values(v, *lo) < 0) lo = v;
      if (!hi || compare_values(v, *hi) > 0) hi = v;
    }
    extreme_floor = 5.0 * median_of(std::move(freqs));
  }

  struct Hit {
    DmvCandidate candidate;
    std::size_t first;
  };
  std::vector<Hit> hits;
  for (const auto& [v, tally] : counts) {
    const std::string text = to_text(v);
    std::optional<DmvRule> rule;
    bool numeric_sentinel = false;
    if (auto x = std::get_if<double>(&v)) numeric_sentinel = (*x == -1.0 || *x == 9999.0);
    if (is_sentinel_token(text) || numeric_sentinel) {
      rule = DmvRule::Sentinel;
    } else if ((lo && v == *lo) || (hi && v == *hi)) {
      if (static_cast<double>(tally.count) > extreme_floor) rule = DmvRule::Extreme;
    }
    if (!rule && pattern && static_cast<double>(tally.count) >= syntactic_floor &&
        !std::regex_match(text, *pattern)) {
      rule = DmvRule::Syntactic;
    }
    if (rule) hits.push_back({DmvCandidate{v, tally.count, *rule}, tally.first});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.candidate.frequency != b.candidate.frequency) {
      return a.candidate.frequency > b.candidate.frequency;
    }
    return a.first < b.first;
  });
  DmvStats out;
  for (auto& h : hits) out.candidate_dmv.push_back(std::move(h.candidate));
  return out;
}

MissingStats profile_missing(const ColumnTable& table, const Target& target) {
  MissingStats out;
  out.row_count = table.row_count();
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (!tuple_null(table, target, r)) continue;
    ++out.null_count;
    if (out.sample_missing.size() < 5) out.sample_missing.push_back(table.row(r));
  }
  out.missing_fraction = out.row_count == 0 ? 0.0
                                            : static_cast<double>(out.null_count) /
                                                  static_cast<double>(out.row_count);
  return out;
}

MissingStats profile_missing(const ColumnTable& table, std::string_view column) {
  return profile_missing(table, column_target(table, column));
}

std::array<double, 5> quantiles_of(std::vector<double> values) {
  if (values.empty()) throw EmptyColumn("no values to take quantiles of");
  std::sort(values.begin(), values.end());
  std::array<double, 5> q{};
  const double last = static_cast<double>(values.size() - 1);
  for (std::size_t k = 0; k < 5; ++k) {
    const double h = last * (static_cast<double>(k) / 4.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    q[k] = (frac == 0.0 || lo + 1 >= values.size())
               ? values[lo]
               : values[lo] + frac * (values[lo + 1] - values[lo]);
  }
  return q;
}

NumericStats compute_quantiles(const ColumnTable& table, std::string_view column) {
  const Column& col = table.column(column);
  if (!is_numeric(col.type())) {
    throw NotNumeric("column " + col.name() + " is " + std::string(cocoon::to_string(col.type())));
  }
  std::vector<double> xs;
  xs.reserve(col.non_null_count());
  for (const auto& v : col.cells()) {
    if (auto x = as_number(v)) xs.push_back(*x);
  }
  if (xs.empty()) throw EmptyColumn("column " + col.name() + " has no non-null values");
  return NumericStats{quantiles_of(std::move(xs))};
}

FrequencyStats compute_value_frequency(const ColumnTable& table, std::string_view column,
                                       std::size_t cap) {
  const Column& col = table.column(column);
  const auto t = col.type();
  if (t != PrimitiveType::String && t != PrimitiveType::Integer && t != PrimitiveType::Boolean) {
    throw NotCategorical("column " + col.name() + " of type " +
                         std::string(cocoon::to_string(t)) + " cannot be categorical");
  }
  std::unordered_map<Value, Tally, ValueHash> counts;
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (col.is_null(r)) continue;
    auto [it, inserted] = counts.try_emplace(col[r], Tally{0, r});
    ++it->second.count;
  }
  FrequencyStats out;
  std::size_t other = 0;
  for (auto it : by_count(counts)) {
    if (out.value_freq.size() < cap) {
      out.value_freq.emplace_back(to_text(it->first), it->second.count);
    } else {
      other += it->second.count;
    }
  }
  if (other > 0) out.value_freq.emplace_back(std::string(kOtherBucket), other);
  return out;
}

bool is_categorical(const ColumnTable& table, std::string_view column) {
  const Column& col = table.column(column);
  if (col.type() != PrimitiveType::String && col.type() != PrimitiveType::Integer) return false;
  if (col.non_null_count() == 0) return false;
  std::unordered_set<Value, ValueHash> distinct;
  for (const auto& v : col.cells()) {
    if (!is_null(v)) distinct.insert(v);
  }
  return distinct.size() <= 100 &&
         static_cast<double>(distinct.size()) / static_cast<double>(col.non_null_count()) <= 0.2;
}

}  // namespace cocoon::stats
