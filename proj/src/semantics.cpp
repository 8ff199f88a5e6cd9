#include "cocoon/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cocoon/text_table.hpp"

namespace cocoon::semantics {

namespace {

constexpr std::string_view kSystem =
    "You are an expert data analyst reviewing a table for data quality errors. Think step by "
    "step and explain your reasoning.";

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> member_names(const ColumnTable& table, const stats::Target& target) {
  std::vector<std::string> out;
  for (auto idx : target.columns) out.push_back(table.column(idx).schema().name);
  return out;
}

// Columns named by a target: the column itself, the members of an "a+b" tuple,
// or none for the table.
std::vector<std::string> target_members(const ColumnTable& table, const std::string& target) {
  if (table.find_column(target)) return {target};
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = target.find('+', start);
    parts.push_back(target.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  for (const auto& p : parts) {
    if (!table.find_column(p)) return {};
  }
  return parts;
}

std::string context_block(const context::SemanticContext& ctx,
                          const std::vector<std::string>& columns) {
  std::string out = "## CONTEXT\nTable summary:\n" + ctx.table_summary.text + "\n";
  for (const auto& c : columns) {
    const auto it = ctx.column_summaries.find(c);
    out += "Column " + c + ": " +
           (it == ctx.column_summaries.end() ? std::string("(no summary)") : it->second) + "\n";
  }
  return out;
}

std::string json_block(const Json& j) { return "```json\n" + j.dump(2) + "\n```\n"; }

llm::Checked<Json> answer_object(const std::string& raw) {
  try {
    Json doc = llm::extract_fenced_json(raw);
    if (!doc.is_object()) return llm::Checked<Json>::fail("expected a JSON object");
    return llm::Checked<Json>::ok(std::move(doc));
  } catch (const NoStructuredContent& e) {
    return llm::Checked<Json>::fail(e.what());
  }
}

std::optional<std::string> non_empty_string(const Json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return std::nullopt;
  std::string s = it->get<std::string>();
  if (s.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
  return s;
}

std::string scalar_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

// Output schema and instruction per kind.
struct ProfileTask {
  const char* key;
  const char* instruction;
  const char* example;
};

ProfileTask profile_task(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Duplication:
      return {"ExpDuplicate",
              "Decide whether fully duplicated rows are expected in this table for reasons other "
              "than data errors.",
              "true"};
    case ErrorKind::ColumnType:
      return {"ExpType",
              "Decide which primitive type this column should have: one of boolean, integer, "
              "float, string, date, timestamp.",
              "\"date\""};
    case ErrorKind::UniqueKey:
      return {"ExpUnique", "Decide whether the values of this column are expected to be unique.",
              "true"};
    case ErrorKind::Dmv:
      return {"PotentialDMV",
              "List concrete values that would act as placeholders for missing data in this "
              "column (disguised missing values). Use an empty list if none are plausible.",
              "[\"N/A\", \"1970-01-01\"]"};
    case ErrorKind::MissingValue:
      return {"AllowMissing", "Decide whether missing values are acceptable in this column.",
              "false"};
    case ErrorKind::NumericOutlier:
      return {"ExpQuantile",
              "Give the expected minimum, first quartile, median, third quartile and maximum of "
              "this column as five numbers in non-decreasing order.",
              "[0, 20, 40, 60, 130]"};
    case ErrorKind::StringOutlier:
      return {"ExpStr", "Give several realistic example values for this column.",
              "[\"example 1\", \"example 2\"]"};
    case ErrorKind::MissingRecord:
      return {"ExpFreq",
              "Give the expected relative frequency of each value of this column as an object "
              "mapping value to a non-negative weight.",
              "{\"value A\": 0.5, \"value B\": 0.5}"};
  }
  return {"", "", ""};
}

const char* review_task(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Duplication:
      return "The table has duplicated rows. Assess whether SampleDuplicate is acceptable given "
             "ExpDuplicate and the thought.";
    case ErrorKind::ColumnType:
      return "CurrentType does not match ExpType. Inspect SampleValue and assess whether "
             "CurrentType is acceptable or indicates an error.";
    case ErrorKind::UniqueKey:
      return "The column is expected to be unique but UniqueRatio is not 1. Assess whether the "
             "values in SampleNonUnique are acceptable.";
    case ErrorKind::Dmv:
      return "Compare CandidateDMV with PotentialDMV. Confirm each candidate as a disguised "
             "missing value or rule it out.";
    case ErrorKind::MissingValue:
      return "The column has missing values. Assess whether SampleMissing is acceptable given "
             "AllowMissing and the thought.";
    case ErrorKind::NumericOutlier:
      return "Check whether Quantile aligns with ExpQuantile and assess whether the deviations "
             "are acceptable.";
    case ErrorKind::StringOutlier:
      return "Validate RegexPattern and SampleInlier against ExpStr. Assess SampleOutlier for "
             "acceptability and SampleInlier for potential errors.";
    case ErrorKind::MissingRecord:
      return "Both distributions are normalized to relative frequencies. Check whether ValueFreq "
             "aligns with ExpFreq and assess deviations that may indicate missing records.";
  }
  return "";
}

// Renders sample rows as aligned tables; everything else stays JSON.
std::string evidence_block(const stats::StatPayload& stat, const ColumnTable& table) {
  Json j = stat_to_json(stat, table);
  std::string tables;
  const auto columns = table.column_names();
  if (const auto* d = std::get_if<stats::DuplicationStats>(&stat)) {
    j.erase("SampleDuplicate");
    if (!d->sample_duplicate.empty()) {
      std::vector<std::string> cols = columns;
      cols.push_back("count");
      std::vector<Row> rows;
      for (const auto& g : d->sample_duplicate) {
        Row r = g.row;
        r.emplace_back(static_cast<std::int64_t>(g.count));
        rows.push_back(std::move(r));
      }
      tables = "SampleDuplicate:\n" + render_text_table(cols, rows);
    }
  } else if (const auto* m = std::get_if<stats::MissingStats>(&stat)) {
    j.erase("SampleMissing");
    if (!m->sample_missing.empty()) {
      tables = "SampleMissing:\n" + render_text_table(columns, m->sample_missing);
    }
  } else if (const auto* f = std::get_if<stats::FrequencyStats>(&stat)) {
    double total = 0;
    for (const auto& [v, c] : f->value_freq) total += static_cast<double>(c);
    Json norm = Json::object();
    for (const auto& [v, c] : f->value_freq) {
      norm[v] = total > 0 ? static_cast<double>(c) / total : 0.0;
    }
    j["ValueFreq"] = std::move(norm);
  }
  return "## EVIDENCE\n" + json_block(j) + tables;
}

bool expectation_matches(const Expectation& e, ErrorKind kind) { return kind_of(e) == kind; }

}  // namespace

ErrorKind kind_of(const Expectation& e) { return kAllErrorKinds[e.index()]; }

Json expectation_to_json(const Expectation& e) {
  Json j = Json::object();
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExpDuplicate>) {
          j["ExpDuplicate"] = x.expected;
        } else if constexpr (std::is_same_v<T, ExpType>) {
          j["ExpType"] = std::string(to_string(x.type));
        } else if constexpr (std::is_same_v<T, ExpUnique>) {
          j["ExpUnique"] = x.expected;
        } else if constexpr (std::is_same_v<T, PotentialDmv>) {
          j["PotentialDMV"] = x.values;
        } else if constexpr (std::is_same_v<T, AllowMissing>) {
          j["AllowMissing"] = x.allowed;
        } else if constexpr (std::is_same_v<T, ExpQuantile>) {
          j["ExpQuantile"] = x.quantile;
        } else if constexpr (std::is_same_v<T, ExpStr>) {
          j["ExpStr"] = x.examples;
        } else {
          Json w = Json::object();
          for (const auto& [k, v] : x.weights) w[k] = v;
          j["ExpFreq"] = std::move(w);
        }
      },
      e);
  return j;
}

llm::Checked<Expectation> expectation_from_json(ErrorKind kind, const Json& doc) {
  using R = llm::Checked<Expectation>;
  const char* key = profile_task(kind).key;
  if (!doc.is_object()) return R::fail("expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end()) return R::fail(std::string("missing field ") + key);
  const Json& v = *it;
  const std::string field(key);
  switch (kind) {
    case ErrorKind::Duplication:
    case ErrorKind::UniqueKey:
    case ErrorKind::MissingValue: {
      if (!v.is_boolean()) return R::fail(field + " must be true or false");
      const bool b = v.get<bool>();
      if (kind == ErrorKind::Duplication) return R::ok(ExpDuplicate{b});
      if (kind == ErrorKind::UniqueKey) return R::ok(ExpUnique{b});
      return R::ok(AllowMissing{b});
    }
    case ErrorKind::ColumnType: {
      if (!v.is_string()) return R::fail(field + " must be a string");
      const auto t = primitive_type_from_string(v.get<std::string>());
      if (!t) {
        return R::fail(field +
                       " must be one of boolean, integer, float, string, date, timestamp; got " +
                       v.dump());
      }
      return R::ok(ExpType{*t});
    }
    case ErrorKind::Dmv: {
      if (!v.is_array()) return R::fail(field + " must be a list of values");
      PotentialDmv out;
      for (const auto& x : v) {
        if (!x.is_primitive() || x.is_null()) {
          return R::fail(field + " entries must be strings, numbers or booleans");
        }
        out.values.push_back(scalar_text(x));
      }
      return R::ok(std::move(out));
    }
    case ErrorKind::NumericOutlier: {
      if (!v.is_array() || v.size() != 5) return R::fail(field + " must be a list of 5 numbers");
      ExpQuantile out;
      for (std::size_t i = 0; i < 5; ++i) {
        if (!v[i].is_number()) return R::fail(field + " must be a list of 5 numbers");
        out.quantile[i] = v[i].get<double>();
        if (!std::isfinite(out.quantile[i])) return R::fail(field + " values must be finite");
        if (i > 0 && out.quantile[i] < out.quantile[i - 1]) {
          return R::fail(field + " must be in non-decreasing order");
        }
      }
      return R::ok(out);
    }
    case ErrorKind::StringOutlier: {
      if (!v.is_array() || v.empty()) return R::fail(field + " must be a non-empty list of strings");
      ExpStr out;
      for (const auto& x : v) {
        if (!x.is_string()) return R::fail(field + " must be a non-empty list of strings");
        out.examples.push_back(x.get<std::string>());
      }
      return R::ok(std::move(out));
    }
    case ErrorKind::MissingRecord: {
      if (!v.is_object() || v.empty()) {
        return R::fail(field + " must be a non-empty object mapping value to weight");
      }
      ExpFreq out;
      double total = 0;
      for (const auto& [k, w] : v.items()) {
        if (!w.is_number() || !std::isfinite(w.get<double>()) || w.get<double>() < 0) {
          return R::fail(field + " weights must be non-negative numbers");
        }
        out.weights.emplace_back(k, w.get<double>());
        total += w.get<double>();
      }
      if (total <= 0) return R::fail(field + " weights must not all be zero");
      for (auto& [k, w] : out.weights) w /= total;
      return R::ok(std::move(out));
    }
  }
  return R::fail("unknown kind");
}

std::string_view to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Machine: return "machine";
    case VerdictStatus::Accepted: return "accepted";
    case VerdictStatus::Overridden: return "overridden";
  }
  return "machine";
}

std::optional<VerdictStatus> verdict_status_from_string(std::string_view name) {
  for (auto s : {VerdictStatus::Machine, VerdictStatus::Accepted, VerdictStatus::Overridden}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(HigherOrderType type) {
  switch (type) {
    case HigherOrderType::ZipCode: return "zip code";
    case HigherOrderType::FipsCode: return "FIPS code";
    case HigherOrderType::CountryName: return "country name";
    case HigherOrderType::UsStateName: return "US state name";
    case HigherOrderType::LatLong: return "lat/long coordinates";
    case HigherOrderType::Category: return "category";
    case HigherOrderType::FreeText: return "free text";
  }
  return "free text";
}

std::optional<HigherOrderType> higher_order_type_from_string(std::string_view name) {
  const std::string key = lower(name);
  for (auto t : {HigherOrderType::ZipCode, HigherOrderType::FipsCode, HigherOrderType::CountryName,
                 HigherOrderType::UsStateName, HigherOrderType::LatLong,
                 HigherOrderType::Category, HigherOrderType::FreeText}) {
    if (lower(to_string(t)) == key) return t;
  }
  return std::nullopt;
}

const HigherOrderEntry* HigherOrderAssignment::entry_of(std::string_view column) const {
  for (const auto& e : entries) {
    if (std::find(e.columns.begin(), e.columns.end(), column) != e.columns.end()) return &e;
  }
  return nullptr;
}

std::optional<HigherOrderType> HigherOrderAssignment::type_of(std::string_view column) const {
  const auto* e = entry_of(column);
  if (!e) return std::nullopt;
  return e->type;
}

std::vector<HigherOrderEntry> HigherOrderAssignment::groups() const {
  std::vector<HigherOrderEntry> out;
  for (const auto& e : entries) {
    if (e.columns.size() > 1) out.push_back(e);
  }
  return out;
}

void HigherOrderAssignment::merge(const HigherOrderAssignment& other) {
  for (const auto& e : other.entries) {
    const bool taken = std::any_of(e.columns.begin(), e.columns.end(),
                                   [&](const std::string& c) { return entry_of(c) != nullptr; });
    if (!taken) entries.push_back(e);
  }
}

Json HigherOrderAssignment::to_json() const {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back({{"columns", e.columns}, {"type", std::string(semantics::to_string(e.type))}});
  }
  return out;
}

StepId classify_step(const context::LeafGroup& group) {
  return {std::string(phase::kClassify), "HigherOrder", group.id()};
}

StepId profile_step(ErrorKind kind, std::string_view target) {
  return {std::string(phase::kSem), std::string(to_string(kind)), std::string(target)};
}

StepId review_step(ErrorKind kind, std::string_view target) {
  return {std::string(phase::kReview), std::string(to_string(kind)), std::string(target)};
}

HigherOrderAssignment classify_higher_order(const context::LeafGroup& group,
                                            const context::SemanticContext& ctx,
                                            const ColumnTable& table, llm::LlmClient& client) {
  const auto& cols = group.columns;
  std::string user = context_block(ctx, cols);
  user += "## EVIDENCE\nFirst five rows of the column group:\n" +
          render_projection(table, cols, 5);
  user +=
      "## TASK\nAssign higher-order types to the columns of this group where they apply. "
      "Allowed types: zip code, FIPS code, country name, US state name, lat/long coordinates, "
      "category, free text. A lat/long coordinates entry lists the latitude and longitude "
      "columns together; every other entry lists one column. Leave out columns with no "
      "higher-order type. Each column may appear at most once.\n";
  llm::ChatRequest req{classify_step(group).str(), std::string(kSystem), std::move(user),
                       "```json\n{\"assignments\": [{\"columns\": [\"column\", ...], \"type\": "
                       "\"category\"}, ...]}\n```"};

  llm::Validator<HigherOrderAssignment> check = [&cols](const std::string& raw) {
    using R = llm::Checked<HigherOrderAssignment>;
    Json doc;
    try {
      doc = llm::extract_fenced_json(raw);
    } catch (const NoStructuredContent& e) {
      return R::fail(e.what());
    }
    const Json* list = &doc;
    if (doc.is_object()) {
      const auto it = doc.find("assignments");
      if (it == doc.end()) return R::fail("missing field assignments");
      list = &*it;
    }
    if (!list->is_array()) return R::fail("assignments must be a list");
    HigherOrderAssignment out;
    std::set<std::string> seen;
    for (const auto& item : *list) {
      if (!item.is_object() || !item.contains("columns") || !item.contains("type") ||
          !item["columns"].is_array() || !item["type"].is_string()) {
        return R::fail("each assignment needs a list of columns and a type string");
      }
      const auto type = higher_order_type_from_string(item["type"].get<std::string>());
      if (!type) return R::fail("unknown higher-order type " + item["type"].dump());
      HigherOrderEntry entry{{}, *type};
      for (const auto& c : item["columns"]) {
        if (!c.is_string()) return R::fail("column names must be strings");
        const auto name = c.get<std::string>();
        if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
          return R::fail("column " + name + " is not in this group; allowed: " + join(cols));
        }
        if (!seen.insert(name).second) return R::fail("column " + name + " is assigned twice");
        entry.columns.push_back(name);
      }
      if (entry.columns.empty()) return R::fail("an assignment lists no columns");
      if (*type == HigherOrderType::LatLong && entry.columns.size() != 2) {
        return R::fail("lat/long coordinates must list exactly two columns");
      }
      if (*type != HigherOrderType::LatLong && entry.columns.size() != 1) {
        return R::fail("only lat/long coordinates may span several columns");
      }
      out.entries.push_back(std::move(entry));
    }
    return R::ok(std::move(out));
  };

  HigherOrderAssignment parsed = client.complete_validated(req, check).parsed;
  HigherOrderAssignment result;
  for (auto& e : parsed.entries) {
    if (e.type == HigherOrderType::Category) {
      const auto& name = e.columns.front();
      const bool confirmed = table.column(name).schema().ptype == PrimitiveType::Boolean ||
                             stats::is_categorical(table, name);
      if (!confirmed) continue;
    }
    result.entries.push_back(std::move(e));
  }
  for (const auto& c : cols) {
    if (!result.entry_of(c) && table.column(c).schema().ptype == PrimitiveType::String) {
      result.entries.push_back({{c}, HigherOrderType::FreeText});
    }
  }
  return result;
}

SemProfile semantic_profile(ErrorKind kind, const stats::Target& target,
                            const context::SemanticContext& ctx, const ColumnTable& table,
                            llm::LlmClient& client) {
  if (!kind_applies(kind, table, target)) {
    throw KindNotApplicable(std::string(to_string(kind)) + " does not apply to " + target.name);
  }
  const auto members = member_names(table, target);
  const auto task = profile_task(kind);
  std::string user = context_block(ctx, members);
  user += "## EVIDENCE\n";
  if (members.empty()) {
    user += "Table " + table.name() + " with columns: " + join(table.column_names()) + "\n";
  } else {
    for (const auto& m : members) {
      user += "Column " + m + " is stored as " +
              std::string(to_string(table.column(m).schema().ptype)) + "\n";
    }
    if (target.is_tuple()) user += "The columns are treated together as one value.\n";
  }
  user += "## TASK\n";
  user += std::string(task.instruction) + " Explain your reasoning in Thought.\n";
  llm::ChatRequest req{profile_step(kind, target.name).str(), std::string(kSystem),
                       std::move(user),
                       std::string("```json\n{\"Thought\": \"...\", \"") + task.key +
                           "\": " + task.example + "}\n```"};
  llm::Validator<SemProfile> check = [&](const std::string& raw) {
    using R = llm::Checked<SemProfile>;
    auto obj = answer_object(raw);
    if (!obj.value) return R::fail(obj.diagnostic);
    auto thought = non_empty_string(*obj.value, "Thought");
    if (!thought) return R::fail("Thought must be a non-empty string");
    auto exp = expectation_from_json(kind, *obj.value);
    if (!exp.value) return R::fail(exp.diagnostic);
    return R::ok(SemProfile{kind, target.name, std::move(*exp.value), std::move(*thought)});
  };
  return client.complete_validated(req, check).parsed;
}

bool needs_review(const stats::StatPayload& stat, const SemProfile& sem) {
  const ErrorKind kind = cocoon::kind_of(stat);
  if (kind != sem.kind || !expectation_matches(sem.expectation, kind)) {
    throw std::invalid_argument("statistical and semantic profiles are for different kinds");
  }
  switch (kind) {
    case ErrorKind::Duplication:
      return std::get<stats::DuplicationStats>(stat).has_duplicate;
    case ErrorKind::UniqueKey:
      return std::get<ExpUnique>(sem.expectation).expected &&
             std::get<stats::UniquenessStats>(stat).unique_ratio != 1.0;
    case ErrorKind::MissingValue:
      return std::get<stats::MissingStats>(stat).null_count > 0;
    case ErrorKind::Dmv:
      return !std::get<stats::DmvStats>(stat).candidate_dmv.empty();
    case ErrorKind::ColumnType:
      return std::get<stats::TypeStats>(stat).current_type !=
             std::get<ExpType>(sem.expectation).type;
    case ErrorKind::NumericOutlier:
    case ErrorKind::StringOutlier:
    case ErrorKind::MissingRecord:
      return true;
  }
  return true;
}

ReviewVerdict semantic_review(const stats::StatPayload& stat, const SemProfile& sem,
                              const ColumnTable& table, const context::SemanticContext* ctx,
                              llm::LlmClient& client) {
  ReviewVerdict verdict;
  verdict.kind = sem.kind;
  verdict.target = sem.target;
  if (!needs_review(stat, sem)) {
    verdict.reasoning = std::string(kNoDiscrepancy);
    verdict.gated = true;
    return verdict;
  }
  const auto members = target_members(table, sem.target);
  std::string user;
  if (ctx) {
    user = context_block(*ctx, members);
  } else {
    user = "## CONTEXT\n";
  }
  user += "Expectation:\n" + json_block(expectation_to_json(sem.expectation));
  user += "Thought: " + sem.thought + "\n";
  user += evidence_block(stat, table);
  user += std::string("## TASK\n") + review_task(sem.kind) +
          " Decide whether this is a data error and explain why.\n";
  llm::ChatRequest req{review_step(sem.kind, sem.target).str(), std::string(kSystem),
                       std::move(user),
                       "```json\n{\"reasoning\": \"...\", \"is_error\": true}\n```"};
  llm::Validator<ReviewVerdict> check = [&verdict](const std::string& raw) {
    using R = llm::Checked<ReviewVerdict>;
    auto obj = answer_object(raw);
    if (!obj.value) return R::fail(obj.diagnostic);
    const auto it = obj.value->find("is_error");
    if (it == obj.value->end() || !it->is_boolean()) {
      return R::fail("is_error must be true or false");
    }
    auto reasoning = non_empty_string(*obj.value, "reasoning");
    if (!reasoning) return R::fail("reasoning must be a non-empty string");
    ReviewVerdict v = verdict;
    v.is_error = it->get<bool>();
    v.machine_is_error = v.is_error;
    v.reasoning = std::move(*reasoning);
    return R::ok(std::move(v));
  };
  return client.complete_validated(req, check).parsed;
}

}  // namespace cocoon::semantics
