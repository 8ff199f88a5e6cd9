#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "cocoon/csv.hpp"
#include "cocoon/errors.hpp"
#include "cocoon/stats.hpp"
#include "fixtures.hpp"

using namespace cocoon;
using namespace cocoon::stats;

namespace {

ColumnTable single(const std::string& name, PrimitiveType type, std::vector<Value> cells) {
  std::vector<Column> cols;
  cols.emplace_back(ColumnSchema{name, 0, type}, std::move(cells));
  return ColumnTable::make("t", std::move(cols));
}

ColumnTable ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> cells;
  for (auto x : xs) cells.emplace_back(x);
  return single("x", PrimitiveType::Integer, std::move(cells));
}

ColumnTable strings(const std::vector<std::string>& xs) {
  std::vector<Value> cells;
  for (const auto& x : xs) cells.push_back(x.empty() ? Value{} : Value{x});
  return single("s", PrimitiveType::String, std::move(cells));
}

// Row key for oracles: canonical text with an explicit null marker.
std::vector<std::string> key_of(const Row& row) {
  std::vector<std::string> k;
  for (const auto& v : row) k.push_back(is_null(v) ? std::string("\x01null") : to_text(v));
  return k;
}

struct OracleCount {
  std::size_t count = 0;
  std::size_t first = 0;
};

std::array<double, 5> oracle_quantiles(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::array<double, 5> q{};
  for (int k = 0; k < 5; ++k) {
    const double h = (static_cast<double>(xs.size()) - 1.0) * k / 4.0;
    const double lo = std::floor(h);
    const double hi = std::ceil(h);
    q[k] = xs[static_cast<std::size_t>(lo)] +
           (h - lo) * (xs[static_cast<std::size_t>(hi)] - xs[static_cast<std::size_t>(lo)]);
  }
  return q;
}

const DmvCandidate* find_dmv(const DmvStats& s, const Value& v) {
  for (const auto& c : s.candidate_dmv) {
    if (c.value == v) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("duplicates: distinct table has none") {
  const auto t = parse_csv("a,b\n1,x\n2,y\n3,z\n", "t");
  const auto d = profile_duplicates(t);
  CHECK_FALSE(d.has_duplicate);
  CHECK(d.sample_duplicate.empty());
}

TEST_CASE("duplicates: repeated votes on the same day") {
  const auto t = parse_csv("day,name\nd1,Alice\nd1,Alice\nd2,Bob\n", "votes");
  const auto d = profile_duplicates(t);
  CHECK(d.has_duplicate);
  REQUIRE(d.sample_duplicate.size() == 1);
  CHECK(d.sample_duplicate[0].count == 2);
  CHECK(d.sample_duplicate[0].row == Row{Value{std::string("d1")}, Value{std::string("Alice")}});
}

TEST_CASE("duplicates: null groups with null") {
  const auto t = parse_csv("a,b\n1,\n1,\n", "t");
  CHECK(profile_duplicates(t).has_duplicate);
}

TEST_CASE("duplicates match a multiset oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    fixtures::RandomTableSpec spec;
    spec.rows = 1 + rng() % 200;
    spec.columns = 1 + rng() % 3;
    spec.alphabet = 2 + rng() % 4;
    const auto t = fixtures::random_table(rng, spec);
    std::map<std::vector<std::string>, OracleCount> counts;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      auto& c = counts[key_of(t.row(r))];
      if (c.count++ == 0) c.first = r;
    }
    std::vector<std::pair<std::vector<std::string>, OracleCount>> groups(counts.begin(),
                                                                         counts.end());
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
      return a.second.count != b.second.count ? a.second.count > b.second.count
                                              : a.second.first < b.second.first;
    });
    const bool any = !groups.empty() && groups.front().second.count >= 2;
    const auto d = profile_duplicates(t);
    REQUIRE(d.has_duplicate == any);
    std::size_t expected = 0;
    for (const auto& g : groups) expected += g.second.count >= 2;
    REQUIRE(d.sample_duplicate.size() == std::min<std::size_t>(5, expected));
    for (std::size_t i = 0; i < d.sample_duplicate.size(); ++i) {
      REQUIRE(d.sample_duplicate[i].count >= 2);
      REQUIRE(d.sample_duplicate[i].count == groups[i].second.count);
      REQUIRE(key_of(d.sample_duplicate[i].row) == groups[i].first);
    }
  }
}

TEST_CASE("column type: stored integers that look like dates") {
  const auto t = parse_csv("Date\n20240412\n20240413\n20240412\n", "sales");
  const auto s = profile_column_type(t, "Date");
  CHECK(s.current_type == PrimitiveType::Integer);
  CHECK(std::find(s.sample_value.begin(), s.sample_value.end(), Value{std::int64_t{20240412}}) !=
        s.sample_value.end());
  CHECK(s.sample_value.size() == 2);
}

TEST_CASE("column type: samples are distinct, in file order, at most ten") {
  CHECK(profile_column_type(strings({"", "", ""}), "s").sample_value.empty());
  const auto three = profile_column_type(strings({"b", "a", "b", "c", "a", "c"}), "s");
  CHECK(three.sample_value ==
        std::vector<Value>{Value{std::string("b")}, Value{std::string("a")},
                           Value{std::string("c")}});
  std::vector<std::string> many;
  for (int i = 0; i < 30; ++i) many.push_back("v" + std::to_string(i));
  const auto ten = profile_column_type(strings(many), "s");
  REQUIRE(ten.sample_value.size() == 10);
  CHECK(ten.sample_value.front() == Value{std::string("v0")});
  CHECK_THROWS_AS(profile_column_type(strings(many), "nope"), UnknownColumn);
}

TEST_CASE("uniqueness: 95 distinct person ids over 100 rows") {
  std::vector<std::string> ids;
  for (int i = 0; i < 95; ++i) ids.push_back("p" + std::to_string(i));
  for (int i = 0; i < 5; ++i) ids.push_back("p" + std::to_string(i));
  const auto u = profile_uniqueness(strings(ids), "s");
  CHECK(u.unique_ratio == doctest::Approx(0.95));
  CHECK(u.distinct == 95);
  CHECK(u.sample_non_unique.size() == 5);
  CHECK(u.sample_non_unique.front() == "p0");
}

TEST_CASE("uniqueness: all distinct and all null") {
  const auto u = profile_uniqueness(strings({"a", "b", "", "c"}), "s");
  CHECK(u.unique_ratio == 1.0);
  CHECK(u.non_null == 3);
  CHECK(u.sample_non_unique.empty());
  CHECK_THROWS_AS(profile_uniqueness(strings({"", ""}), "s"), EmptyColumn);
}

TEST_CASE("uniqueness matches a set oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    fixtures::RandomTableSpec spec;
    spec.rows = 1 + rng() % 200;
    spec.columns = 1;
    spec.alphabet = 1 + rng() % 8;
    const auto t = fixtures::random_table(rng, spec);
    std::set<std::string> distinct;
    std::map<std::string, std::size_t> counts;
    std::size_t non_null = 0;
    for (const auto& v : t.column(0).cells()) {
      if (is_null(v)) continue;
      ++non_null;
      distinct.insert(to_text(v));
      ++counts[to_text(v)];
    }
    if (non_null == 0) {
      REQUIRE_THROWS_AS(profile_uniqueness(t, "c0"), EmptyColumn);
      continue;
    }
    const auto u = profile_uniqueness(t, "c0");
    REQUIRE(u.unique_ratio == static_cast<double>(distinct.size()) / non_null);
    REQUIRE(u.distinct == distinct.size());
    for (const auto& s : u.sample_non_unique) REQUIRE(counts[s] >= 2);
    if (u.unique_ratio == 1.0) REQUIRE(u.sample_non_unique.empty());
  }
}

TEST_CASE("tuple targets treat the pair as one value") {
  const auto t = parse_csv("lat,lon\n1.0,2.0\n1.0,3.0\n1.0,2.0\n,2.0\n", "t");
  const std::vector<std::string> pair = {"lat", "lon"};
  const auto target = tuple_target(t, pair);
  CHECK(target.name == "lat+lon");
  const auto u = profile_uniqueness(t, target);
  CHECK(u.non_null == 3);
  CHECK(u.distinct == 2);
  CHECK(u.sample_non_unique == std::vector<std::string>{"(1.0, 2.0)"});
  const auto m = profile_missing(t, target);
  CHECK(m.null_count == 1);
}

TEST_CASE("missing: patient maiden names") {
  const auto t = fixtures::patients();
  const auto m = profile_missing(t, "MAIDEN");
  CHECK(m.missing_fraction == 0.817);
  CHECK(m.null_count == 817);
  REQUIRE(m.sample_missing.size() == 5);
  for (const auto& row : m.sample_missing) CHECK(is_null(row[*t.find_column("MAIDEN")]));
  std::size_t first = 0;
  while (!t.column("MAIDEN").is_null(first)) ++first;
  CHECK(m.sample_missing.front() == t.row(first));
}

TEST_CASE("missing: none missing") {
  const auto m = profile_missing(strings({"a", "b"}), "s");
  CHECK(m.missing_fraction == 0.0);
  CHECK(m.sample_missing.empty());
  CHECK_THROWS_AS(profile_missing(strings({"a"}), "nope"), UnknownColumn);
}

TEST_CASE("missing fraction matches a linear scan") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    fixtures::RandomTableSpec spec;
    spec.rows = 1 + rng() % 300;
    spec.columns = 1;
    spec.null_rate = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto t = fixtures::random_table(rng, spec);
    std::size_t nulls = 0;
    for (const auto& v : t.column(0).cells()) nulls += is_null(v);
    const auto m = profile_missing(t, "c0");
    REQUIRE(m.missing_fraction == static_cast<double>(nulls) / t.row_count());
    REQUIRE(m.null_count == nulls);
    REQUIRE(std::llround(m.missing_fraction * t.row_count()) == static_cast<long long>(nulls));
    REQUIRE(m.sample_missing.size() == std::min<std::size_t>(5, nulls));
  }
}

TEST_CASE("quantiles: the age example") {
  const auto t = ints({-2, -1, -1, 10, 10, 20, 20, 90});
  // Hand computation: n=8, ranks 0, 1.75, 3.5, 5.25, 7 over the sorted values.
  //   rank 1.75 -> -1 + 0.75*(-1 - -1) = -1
  //   rank 3.5  -> 10 + 0.5*(10 - 10) = 10
  //   rank 5.25 -> 20 + 0.25*(20 - 20) = 20
  const auto q = compute_quantiles(t, "x").quantile;
  CHECK(q == std::array<double, 5>{-2, -1, 10, 20, 90});
}

TEST_CASE("quantiles: single value and errors") {
  CHECK(compute_quantiles(ints({7}), "x").quantile == std::array<double, 5>{7, 7, 7, 7, 7});
  CHECK_THROWS_AS(compute_quantiles(strings({"a"}), "s"), NotNumeric);
  CHECK_THROWS_AS(compute_quantiles(single("x", PrimitiveType::Float, {Value{}}), "x"),
                  EmptyColumn);
}

TEST_CASE("quantiles match a sort-based oracle") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 1000;
    std::normal_distribution<double> dist(0.0, 100.0);
    std::vector<Value> cells;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = dist(rng);
      cells.emplace_back(x);
      xs.push_back(x);
    }
    const auto q = compute_quantiles(single("f", PrimitiveType::Float, cells), "f").quantile;
    const auto o = oracle_quantiles(xs);
    for (int k = 0; k < 5; ++k) REQUIRE(std::abs(q[k] - o[k]) <= 1e-9);
    for (int k = 1; k < 5; ++k) REQUIRE(q[k - 1] <= q[k]);
    REQUIRE(q[0] == *std::min_element(xs.begin(), xs.end()));
    REQUIRE(q[4] == *std::max_element(xs.begin(), xs.end()));
  }
}

TEST_CASE("dmv: sentinel tokens") {
  std::vector<std::string> xs;
  for (int i = 0; i < 40; ++i) xs.push_back("Store " + std::to_string(i));
  xs.push_back("-");
  xs.push_back("-");
  xs.push_back("#Value!");
  const auto t = strings(xs);
  const auto d = detect_candidate_dmvs(t, "s");
  const auto* dash = find_dmv(d, Value{std::string("-")});
  const auto* value = find_dmv(d, Value{std::string("#Value!")});
  REQUIRE(dash);
  REQUIRE(value);
  CHECK(dash->rule == DmvRule::Sentinel);
  CHECK(dash->frequency == 2);
  CHECK(value->rule == DmvRule::Sentinel);
  CHECK(d.candidate_dmv.size() == 2);
  for (auto tok : {"N/A", " null ", "Unknown", "?", "9999", "-1", "--", "missing", "none"}) {
    CHECK(is_sentinel_token(tok));
  }
  CHECK_FALSE(is_sentinel_token("0"));
}

TEST_CASE("dmv: epoch spike in login timestamps") {
  std::vector<Value> cells;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    if (i % 5 < 2) {
      cells.emplace_back(Timestamp{0});
    } else {
      cells.emplace_back(Timestamp{1'600'000'000'000'000LL +
                                   static_cast<std::int64_t>(rng() % 10'000'000'000'000ULL)});
    }
  }
  const auto d = detect_candidate_dmvs(single("login", PrimitiveType::Timestamp, cells), "login");
  const auto* epoch = find_dmv(d, Value{Timestamp{0}});
  REQUIRE(epoch);
  CHECK(epoch->frequency == 40);
  CHECK((epoch->rule == DmvRule::Sentinel || epoch->rule == DmvRule::Extreme));
  CHECK(d.candidate_dmv.size() == 1);
}

TEST_CASE("dmv: extreme spike at the column maximum") {
  std::vector<Value> cells;
  for (int i = 0; i < 50; ++i) cells.emplace_back(std::int64_t{i});
  for (int i = 0; i < 20; ++i) cells.emplace_back(std::int64_t{999});
  const auto d = detect_candidate_dmvs(single("age", PrimitiveType::Integer, cells), "age");
  REQUIRE(d.candidate_dmv.size() == 1);
  CHECK(d.candidate_dmv[0].value == Value{std::int64_t{999}});
  CHECK(d.candidate_dmv[0].rule == DmvRule::Extreme);
}

TEST_CASE("dmv: frequent values off the induced pattern are syntactic") {
  std::vector<std::string> xs;
  for (int i = 0; i < 95; ++i) xs.push_back("AB-" + std::to_string(10 + i % 90));
  for (int i = 0; i < 5; ++i) xs.push_back("xyz");
  const auto t = strings(xs);
  const auto values = text_values(t, "s");
  const auto induced = induce_regex_pattern(values, 0.9);
  const auto d = detect_candidate_dmvs(t, "s", &induced);
  REQUIRE(d.candidate_dmv.size() == 1);
  CHECK(d.candidate_dmv[0].value == Value{std::string("xyz")});
  CHECK(d.candidate_dmv[0].rule == DmvRule::Syntactic);
  CHECK(d.candidate_dmv[0].frequency == 5);
}

TEST_CASE("dmv: a uniform column has no candidates") {
  std::vector<Value> cells;
  for (int i = 0; i < 100; ++i) cells.emplace_back(std::int64_t{i % 10 + 1});
  CHECK(detect_candidate_dmvs(single("x", PrimitiveType::Integer, cells), "x")
            .candidate_dmv.empty());
  CHECK_THROWS_AS(detect_candidate_dmvs(single("x", PrimitiveType::Integer, cells), "y"),
                  UnknownColumn);
}

TEST_CASE("frequency: october-heavy halloween sales") {
  std::vector<std::string> months;
  const char* names[] = {"January", "February", "March",     "April",   "May",      "June",
                         "July",    "August",   "September", "October", "November", "December"};
  for (int m = 0; m < 12; ++m) {
    const int n = m == 9 ? 500 : 20;
    for (int i = 0; i < n; ++i) months.push_back(names[m]);
  }
  const auto f = compute_value_frequency(strings(months), "s");
  REQUIRE(f.value_freq.size() == 12);
  CHECK(f.value_freq.front() == std::pair<std::string, std::size_t>{"October", 500});
  CHECK(f.value_freq[1].second == 20);
  CHECK(f.value_freq[1].first == "January");
}

TEST_CASE("frequency: boolean 60/40") {
  std::vector<Value> cells;
  for (int i = 0; i < 100; ++i) cells.emplace_back(i < 60);
  cells.emplace_back();
  const auto f = compute_value_frequency(single("b", PrimitiveType::Boolean, cells), "b");
  CHECK(f.value_freq == std::vector<std::pair<std::string, std::size_t>>{{"true", 60},
                                                                          {"false", 40}});
}

TEST_CASE("frequency: cap collapses the tail into the other bucket") {
  std::vector<std::string> xs;
  for (int i = 0; i < 200; ++i) {
    for (int k = 0; k <= i % 3; ++k) xs.push_back("v" + std::to_string(i));
  }
  const auto f = compute_value_frequency(strings(xs), "s", 50);
  REQUIRE(f.value_freq.size() == 51);
  CHECK(f.value_freq.back().first == kOtherBucket);
  std::size_t sum = 0;
  for (const auto& [v, c] : f.value_freq) sum += c;
  CHECK(sum == xs.size());
  CHECK_THROWS_AS(compute_value_frequency(single("f", PrimitiveType::Float, {Value{1.0}}), "f"),
                  NotCategorical);
}

TEST_CASE("frequency matches a hash-map count") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    fixtures::RandomTableSpec spec;
    spec.rows = 1 + rng() % 200;
    spec.columns = 1;
    spec.alphabet = 1 + rng() % 10;
    const auto t = fixtures::random_table(rng, spec);
    if (t.column(0).type() == PrimitiveType::Float) {
      REQUIRE_THROWS_AS(compute_value_frequency(t, "c0"), NotCategorical);
      continue;
    }
    const std::size_t cap = 1 + rng() % 5;
    std::map<std::string, std::size_t> counts;
    for (const auto& v : t.column(0).cells()) {
      if (!is_null(v)) ++counts[to_text(v)];
    }
    const auto f = compute_value_frequency(t, "c0", cap);
    std::size_t sum = 0;
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < f.value_freq.size(); ++i) {
      const auto& [v, c] = f.value_freq[i];
      sum += c;
      if (v == kOtherBucket) {
        REQUIRE(i == cap);
        continue;
      }
      REQUIRE(counts.at(v) == c);
      if (i > 0 && f.value_freq[i - 1].first != kOtherBucket) REQUIRE(f.value_freq[i - 1].second >= c);
      seen[v] = c;
    }
    REQUIRE(sum == t.column(0).non_null_count());
    REQUIRE(seen.size() == std::min(cap, counts.size()));
  }
}

TEST_CASE("is_categorical thresholds") {
  std::vector<std::string> months;
  for (int i = 0; i < 10000; ++i) months.push_back("M" + std::to_string(i % 12));
  CHECK(is_categorical(strings(months), "s"));

  std::vector<std::string> uuids;
  for (int i = 0; i < 500; ++i) uuids.push_back("uuid-" + std::to_string(i * 7919));
  CHECK_FALSE(is_categorical(strings(uuids), "s"));

  std::vector<std::string> edge;
  for (int i = 0; i < 400; ++i) edge.push_back("v" + std::to_string(i % 100));
  CHECK_FALSE(is_categorical(strings(edge), "s"));

  std::vector<std::string> at_limit;
  for (int i = 0; i < 500; ++i) at_limit.push_back("v" + std::to_string(i % 100));
  CHECK(is_categorical(strings(at_limit), "s"));
  CHECK_FALSE(is_categorical(single("f", PrimitiveType::Float, {Value{1.0}}), "f"));
}

TEST_CASE("profiles are deterministic") {
  const auto t = fixtures::patients();
  for (const auto& name : t.column_names()) {
    CHECK(profile_missing(t, name).sample_missing == profile_missing(t, name).sample_missing);
    CHECK(profile_column_type(t, name).sample_value ==
          profile_column_type(t, name).sample_value);
  }
  const auto a = detect_candidate_dmvs(t, "DRIVERS");
  const auto b = detect_candidate_dmvs(t, "DRIVERS");
  REQUIRE(a.candidate_dmv.size() == b.candidate_dmv.size());
}
