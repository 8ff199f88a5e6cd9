#include <doctest.h>

#include <random>
#include <stdexcept>

#include "cocoon/csv.hpp"
#include "cocoon/errors.hpp"
#include "cocoon/semantics.hpp"
#include "fixtures.hpp"

using namespace cocoon;
using namespace cocoon::semantics;

namespace {

bool mentions(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

SemProfile sem_of(ErrorKind kind, const std::string& target, Expectation e) {
  return SemProfile{kind, target, std::move(e), "A thought."};
}

// Independent restatement of the gate table.
bool gate_oracle(const stats::StatPayload& stat, const SemProfile& sem) {
  if (const auto* d = std::get_if<stats::DuplicationStats>(&stat)) return d->has_duplicate;
  if (const auto* u = std::get_if<stats::UniquenessStats>(&stat)) {
    return std::get<ExpUnique>(sem.expectation).expected && u->distinct != u->non_null;
  }
  if (const auto* m = std::get_if<stats::MissingStats>(&stat)) return m->null_count != 0;
  if (const auto* d = std::get_if<stats::DmvStats>(&stat)) return d->candidate_dmv.size() > 0;
  if (const auto* t = std::get_if<stats::TypeStats>(&stat)) {
    return to_string(t->current_type) != to_string(std::get<ExpType>(sem.expectation).type);
  }
  return true;
}

}  // namespace

TEST_CASE("no discrepancy means no review call") {
  const auto t = fixtures::patients();
  auto m = fixtures::mock(llm::MockScript{});

  stats::MissingStats none{0.0, 0, 1000, {}};
  auto v = semantic_review(none, sem_of(ErrorKind::MissingValue, "SSN", AllowMissing{false}), t,
                           nullptr, *m.client);
  CHECK(v.gated);
  CHECK_FALSE(v.is_error);
  CHECK(v.reasoning == kNoDiscrepancy);

  stats::UniquenessStats unique{1.0, 1000, 1000, {}};
  CHECK(semantic_review(unique, sem_of(ErrorKind::UniqueKey, "Id", ExpUnique{true}), t, nullptr,
                        *m.client)
            .gated);
  stats::UniquenessStats repeated{0.5, 500, 1000, {"x"}};
  CHECK(semantic_review(repeated, sem_of(ErrorKind::UniqueKey, "Id", ExpUnique{false}), t,
                        nullptr, *m.client)
            .gated);
  CHECK(semantic_review(stats::DuplicationStats{},
                        sem_of(ErrorKind::Duplication, "patients", ExpDuplicate{false}), t,
                        nullptr, *m.client)
            .gated);
  CHECK(semantic_review(stats::DmvStats{}, sem_of(ErrorKind::Dmv, "SSN", PotentialDmv{{"N/A"}}),
                        t, nullptr, *m.client)
            .gated);
  stats::TypeStats same{PrimitiveType::Date, {}};
  CHECK(semantic_review(same, sem_of(ErrorKind::ColumnType, "BIRTHDATE",
                                     ExpType{PrimitiveType::Date}),
                        t, nullptr, *m.client)
            .gated);
  CHECK(m.provider->total_calls() == 0);
}

TEST_CASE("gates match the rule table on random payloads") {
  std::mt19937_64 rng(9);
  const auto types = {PrimitiveType::Boolean, PrimitiveType::Integer, PrimitiveType::Float,
                      PrimitiveType::String,  PrimitiveType::Date,    PrimitiveType::Timestamp};
  const std::vector<PrimitiveType> ty(types);
  for (int i = 0; i < 500; ++i) {
    stats::StatPayload stat;
    SemProfile sem;
    switch (rng() % 6) {
      case 0: {
        stats::DuplicationStats d;
        d.has_duplicate = rng() % 2;
        stat = d;
        sem = sem_of(ErrorKind::Duplication, "t", ExpDuplicate{rng() % 2 == 0});
        break;
      }
      case 1: {
        const std::size_t n = 1 + rng() % 10, k = 1 + rng() % n;
        stat = stats::UniquenessStats{static_cast<double>(k) / n, k, n, {}};
        sem = sem_of(ErrorKind::UniqueKey, "c", ExpUnique{rng() % 2 == 0});
        break;
      }
      case 2: {
        const std::size_t nulls = rng() % 3;
        stat = stats::MissingStats{nulls / 10.0, nulls, 10, {}};
        sem = sem_of(ErrorKind::MissingValue, "c", AllowMissing{rng() % 2 == 0});
        break;
      }
      case 3: {
        stats::DmvStats d;
        if (rng() % 2) d.candidate_dmv.push_back({Value{std::string("-")}, 3});
        stat = d;
        sem = sem_of(ErrorKind::Dmv, "c", PotentialDmv{});
        break;
      }
      case 4:
        stat = stats::TypeStats{ty[rng() % ty.size()], {}};
        sem = sem_of(ErrorKind::ColumnType, "c", ExpType{ty[rng() % ty.size()]});
        break;
      default:
        stat = stats::NumericStats{};
        sem = sem_of(ErrorKind::NumericOutlier, "c", ExpQuantile{});
    }
    REQUIRE(needs_review(stat, sem) == gate_oracle(stat, sem));
  }
}

TEST_CASE("mismatched kinds are rejected") {
  CHECK_THROWS_AS(
      needs_review(stats::MissingStats{}, sem_of(ErrorKind::UniqueKey, "c", ExpUnique{true})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      needs_review(stats::MissingStats{}, sem_of(ErrorKind::MissingValue, "c", ExpUnique{true})),
      std::invalid_argument);
}

TEST_CASE("expectation fields are shape-checked") {
  auto parse = [](ErrorKind k, const char* text) {
    return expectation_from_json(k, Json::parse(text));
  };
  CHECK(*parse(ErrorKind::Duplication, R"({"ExpDuplicate": true})").value ==
        Expectation{ExpDuplicate{true}});
  CHECK(*parse(ErrorKind::ColumnType, R"({"ExpType": "date"})").value ==
        Expectation{ExpType{PrimitiveType::Date}});
  CHECK(*parse(ErrorKind::Dmv, R"({"PotentialDMV": ["N/A", -1]})").value ==
        Expectation{PotentialDmv{{"N/A", "-1"}}});
  CHECK(*parse(ErrorKind::NumericOutlier, R"({"ExpQuantile": [0, 1, 1, 2, 9.5]})").value ==
        Expectation{ExpQuantile{{0, 1, 1, 2, 9.5}}});
  const auto freq = parse(ErrorKind::MissingRecord, R"({"ExpFreq": {"M": 1, "F": 3}})");
  REQUIRE(freq.value);
  const auto& w = std::get<ExpFreq>(*freq.value).weights;
  REQUIRE(w.size() == 2);
  CHECK(w[0] == std::pair<std::string, double>{"M", 0.25});
  CHECK(w[1] == std::pair<std::string, double>{"F", 0.75});

  const auto missing = parse(ErrorKind::MissingValue, R"({"ExpUnique": true})");
  CHECK_FALSE(missing.value);
  CHECK(mentions(missing.diagnostic, "AllowMissing"));
  CHECK_FALSE(parse(ErrorKind::MissingValue, R"({"AllowMissing": "yes"})").value);
  CHECK(mentions(parse(ErrorKind::ColumnType, R"({"ExpType": "varchar"})").diagnostic, "ExpType"));
  CHECK_FALSE(parse(ErrorKind::NumericOutlier, R"({"ExpQuantile": [1, 2, 3]})").value);
  CHECK_FALSE(parse(ErrorKind::NumericOutlier, R"({"ExpQuantile": [5, 4, 3, 2, 1]})").value);
  CHECK_FALSE(parse(ErrorKind::StringOutlier, R"({"ExpStr": []})").value);
  CHECK_FALSE(parse(ErrorKind::MissingRecord, R"({"ExpFreq": {"a": -1}})").value);
  CHECK_FALSE(parse(ErrorKind::MissingRecord, R"({"ExpFreq": {"a": 0}})").value);
  CHECK_FALSE(parse(ErrorKind::Dmv, R"({"PotentialDMV": [null]})").value);
  CHECK_FALSE(expectation_from_json(ErrorKind::Dmv, Json::array()).value);
}

TEST_CASE("expectations survive a JSON round trip") {
  const std::vector<Expectation> samples = {
      ExpDuplicate{true},
      ExpType{PrimitiveType::Timestamp},
      ExpUnique{false},
      PotentialDmv{{"N/A", "unknown"}},
      AllowMissing{true},
      ExpQuantile{{-1, 0, 0.5, 2, 100}},
      ExpStr{{"a", "b"}},
      ExpFreq{{{"x", 0.25}, {"y", 0.75}}},
  };
  for (const auto& e : samples) {
    const auto back = expectation_from_json(kind_of(e), expectation_to_json(e));
    REQUIRE(back.value);
    CHECK(*back.value == e);
  }
}

TEST_CASE("semantic profiles from the patient script") {
  const auto t = fixtures::patients();
  const auto ctx = fixtures::patients_context();
  auto m = fixtures::mock(fixtures::patients_script());

  const auto maiden = semantic_profile(ErrorKind::MissingValue, stats::column_target(t, "MAIDEN"),
                                       ctx, t, *m.client);
  CHECK(maiden.expectation == Expectation{AllowMissing{true}});
  CHECK_FALSE(maiden.thought.empty());
  const auto prompt = m.provider->prompts("sem.MissingValue:MAIDEN").front();
  CHECK(mentions(prompt, ctx.column_summaries.at("MAIDEN")));
  CHECK(mentions(prompt, ctx.table_summary.text));
  CHECK_FALSE(mentions(prompt, ctx.column_summaries.at("SSN")));

  const auto lat = semantic_profile(ErrorKind::NumericOutlier, stats::column_target(t, "LAT"),
                                    ctx, t, *m.client);
  CHECK(lat.expectation == Expectation{ExpQuantile{{41.0, 41.6, 42.0, 42.4, 43.0}}});

  const auto dup =
      semantic_profile(ErrorKind::Duplication, table_target(t), ctx, t, *m.client);
  CHECK(dup.target == "patients");
  CHECK(dup.expectation == Expectation{ExpDuplicate{false}});

  const auto before = m.provider->total_calls();
  CHECK_THROWS_AS(semantic_profile(ErrorKind::NumericOutlier, stats::column_target(t, "SSN"), ctx,
                                   t, *m.client),
                  KindNotApplicable);
  CHECK(m.provider->total_calls() == before);
}

TEST_CASE("malformed profiles are retried with the diagnostic") {
  const auto t = fixtures::patients();
  const auto ctx = fixtures::patients_context();
  auto m = fixtures::mock(
      {{"sem.MissingValue:MAIDEN",
        {fixtures::fenced({{"Thought", "ok"}}), fixtures::fenced({{"Thought", " "}, {"AllowMissing", true}}),
         fixtures::fenced({{"Thought", "Fine."}, {"AllowMissing", false}})}}});
  const auto p = semantic_profile(ErrorKind::MissingValue, stats::column_target(t, "MAIDEN"), ctx,
                                  t, *m.client);
  CHECK(p.expectation == Expectation{AllowMissing{false}});
  const auto prompts = m.provider->prompts("sem.MissingValue:MAIDEN");
  REQUIRE(prompts.size() == 3);
  CHECK(mentions(prompts[1], "missing field AllowMissing"));
  CHECK(mentions(prompts[2], "Thought"));
}

TEST_CASE("higher-order classification of the patient groups") {
  const auto t = fixtures::patients();
  const auto ctx = fixtures::patients_context();
  auto m = fixtures::mock(fixtures::patients_script());
  const auto leaves = ctx.hierarchy.leaves();

  const auto loc = classify_higher_order(leaves[3], ctx, t, *m.client);
  REQUIRE(loc.entries.size() == 1);
  CHECK(loc.entries[0] == HigherOrderEntry{{"LAT", "LON"}, HigherOrderType::LatLong});
  CHECK(loc.groups().size() == 1);

  const auto demo = classify_higher_order(leaves[2], ctx, t, *m.client);
  CHECK(demo.type_of("GENDER") == HigherOrderType::Category);
  CHECK_FALSE(demo.type_of("BIRTHDATE"));

  const auto names = classify_higher_order(leaves[1], ctx, t, *m.client);
  for (const char* c : {"FIRST", "LAST", "MAIDEN"}) {
    CHECK(names.type_of(c) == HigherOrderType::FreeText);
  }
  const auto prompt = m.provider->prompts("classify.HigherOrder:Patient/Name").front();
  CHECK(mentions(prompt, to_text(t.column("LAST")[4])));
}

TEST_CASE("unconfirmed categories fall back to free text") {
  const auto t = fixtures::patients();
  const auto ctx = fixtures::patients_context();
  const auto leaf = ctx.hierarchy.leaves()[0];
  auto m = fixtures::mock(
      {{"classify.HigherOrder:Patient/Identification",
        {fixtures::fenced({{"assignments", {{{"columns", {"LAT", "LON"}}, {"type", "lat/long coordinates"}}}}}),
         fixtures::fenced({{"assignments", {{{"columns", {"Id", "SSN"}}, {"type", "category"}}}}}),
         fixtures::fenced({{"assignments", {{{"columns", {"Id"}}, {"type", "category"}}}}})}}});
  const auto a = classify_higher_order(leaf, ctx, t, *m.client);
  CHECK(m.provider->calls("classify.HigherOrder:Patient/Identification") == 3);
  const auto prompts = m.provider->prompts("classify.HigherOrder:Patient/Identification");
  CHECK(mentions(prompts[1], "not in this group"));
  CHECK(mentions(prompts[2], "only lat/long"));
  CHECK(a.type_of("Id") == HigherOrderType::FreeText);
  CHECK(a.type_of("SSN") == HigherOrderType::FreeText);
}

TEST_CASE("higher-order names parse case-insensitively") {
  CHECK(higher_order_type_from_string("Lat/Long Coordinates") == HigherOrderType::LatLong);
  CHECK(higher_order_type_from_string("ZIP CODE") == HigherOrderType::ZipCode);
  CHECK_FALSE(higher_order_type_from_string("postcode"));
  HigherOrderAssignment a{{{{"x"}, HigherOrderType::Category}}};
  a.merge({{{{"x", "y"}, HigherOrderType::LatLong}, {{"z"}, HigherOrderType::ZipCode}}});
  REQUIRE(a.entries.size() == 2);
  CHECK(a.type_of("z") == HigherOrderType::ZipCode);
  CHECK(a.type_of("x") == HigherOrderType::Category);
}

TEST_CASE("reviews of the patient fixture") {
  const auto t = fixtures::patients();
  const auto ctx = fixtures::patients_context();
  auto m = fixtures::mock(fixtures::patients_script());
  auto review = [&](ErrorKind k, const char* col) {
    const auto target = stats::column_target(t, col);
    const auto sem = semantic_profile(k, target, ctx, t, *m.client);
    return semantic_review(compute_stat(k, t, target), sem, t, &ctx, *m.client);
  };

  const auto maiden = review(ErrorKind::MissingValue, "MAIDEN");
  CHECK_FALSE(maiden.gated);
  CHECK_FALSE(maiden.is_error);
  CHECK(maiden.status == VerdictStatus::Machine);
  CHECK(mentions(maiden.reasoning, "81.7%"));
  const auto evidence = m.provider->prompts("review.MissingValue:MAIDEN").front();
  CHECK(mentions(evidence, "81.7"));
  CHECK(mentions(evidence, "AllowMissing"));
  CHECK(mentions(evidence, "SampleMissing"));

  const auto ssn = review(ErrorKind::StringOutlier, "SSN");
  CHECK(ssn.is_error);
  CHECK(ssn.machine_is_error);
  CHECK_FALSE(ssn.reasoning.empty());
  CHECK(mentions(m.provider->prompts("review.StringOutlier:SSN").front(), R"(999-\\d{2}-\\d{4})"));

  const auto id_missing = review(ErrorKind::MissingValue, "Id");
  CHECK(id_missing.gated);
  CHECK(m.provider->calls("review.MissingValue:Id") == 0);
}

TEST_CASE("review answers must carry a verdict and reasoning") {
  const auto t = parse_csv("a\n1\n\n2\n", "t");
  auto m = fixtures::mock(
      {{"review.MissingValue:a",
        {fixtures::fenced({{"is_error", "no"}, {"reasoning", "x"}}),
         fixtures::fenced({{"is_error", true}}),
         fixtures::fenced({{"is_error", true}, {"reasoning", "Nulls are not allowed."}})}}});
  const auto stat = compute_stat(ErrorKind::MissingValue, t, stats::column_target(t, "a"));
  const auto v = semantic_review(stat, sem_of(ErrorKind::MissingValue, "a", AllowMissing{false}),
                                 t, nullptr, *m.client);
  CHECK(v.is_error);
  CHECK(v.reasoning == "Nulls are not allowed.");
  CHECK(m.provider->calls("review.MissingValue:a") == 3);
}

TEST_CASE("step ids of semantic steps") {
  CHECK(profile_step(ErrorKind::Dmv, "x").str() == "sem.Dmv:x");
  CHECK(review_step(ErrorKind::UniqueKey, "LAT+LON").str() == "review.UniqueKey:LAT+LON");
  CHECK(classify_step(context::LeafGroup{{"A"}, {"x"}}).str() == "classify.HigherOrder:A");
  CHECK(verdict_status_from_string("overridden") == VerdictStatus::Overridden);
  CHECK_FALSE(verdict_status_from_string("OVERRIDDEN"));
}
