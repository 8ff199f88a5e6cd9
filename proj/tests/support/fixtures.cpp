#include "fixtures.hpp"

#include "cocoon/csv.hpp"
#include "cocoon/profile.hpp"
#include "cocoon/semantics.hpp"

namespace fixtures {

using cocoon::Json;

std::filesystem::path data_dir() { return COCOON_TEST_DATA_DIR; }

cocoon::ColumnTable patients() { return cocoon::load_csv(data_dir() / "patients.csv", "patients"); }

cocoon::llm::MockScript patients_script() {
  return cocoon::llm::MockScript::load(data_dir() / "patients_mock.json");
}

cocoon::context::AttributeHierarchy patients_hierarchy() {
  using cocoon::context::HierarchyNode;
  HierarchyNode root{"Patient", {}, {}};
  root.children = {
      HierarchyNode{"Identification", {}, {"Id", "SSN", "DRIVERS"}},
      HierarchyNode{"Name", {}, {"FIRST", "LAST", "MAIDEN"}},
      HierarchyNode{"Demographics", {}, {"BIRTHDATE", "GENDER"}},
      HierarchyNode{"Location", {}, {"LAT", "LON"}},
  };
  return {{root}};
}

cocoon::context::SemanticContext patients_context() {
  const auto script = patients_script();
  cocoon::context::SemanticContext ctx;
  ctx.table_summary = {script.responses.at("ctx.table_summary").front()};
  ctx.hierarchy = patients_hierarchy();
  for (const auto& leaf : ctx.hierarchy.leaves()) {
    const auto doc = cocoon::llm::extract_fenced_json(
        script.responses.at("ctx.group_summary:" + leaf.id()).front());
    for (const auto& [k, v] : doc.items()) ctx.column_summaries[k] = v.get<std::string>();
  }
  return ctx;
}

Mock mock_script(cocoon::llm::MockScript script, int max_retries) {
  cocoon::llm::ProviderConfig cfg;
  cfg.max_retries = max_retries;
  auto provider = std::make_shared<cocoon::llm::MockProvider>(std::move(script));
  return {provider, std::make_shared<cocoon::llm::LlmClient>(provider, cfg)};
}

Mock mock(const std::map<std::string, std::vector<std::string>>& responses, int max_retries) {
  return mock_script(cocoon::llm::MockScript{responses}, max_retries);
}

std::string fenced(const Json& j) { return "```json\n" + j.dump(2) + "\n```"; }

std::string generic_leaf(std::size_t i) { return "Table/G" + std::to_string(i); }

namespace {

Json expectation_for(cocoon::ErrorKind kind, cocoon::PrimitiveType type) {
  using cocoon::ErrorKind;
  switch (kind) {
    case ErrorKind::Duplication:
      return {{"ExpDuplicate", false}};
    case ErrorKind::ColumnType:
      return {{"ExpType", std::string(cocoon::to_string(type))}};
    case ErrorKind::UniqueKey:
      return {{"ExpUnique", false}};
    case ErrorKind::Dmv:
      return {{"PotentialDMV", {"N/A"}}};
    case ErrorKind::MissingValue:
      return {{"AllowMissing", true}};
    case ErrorKind::NumericOutlier:
      return {{"ExpQuantile", {0, 1, 2, 3, 4}}};
    case ErrorKind::StringOutlier:
      return {{"ExpStr", {"example"}}};
    case ErrorKind::MissingRecord:
      return {{"ExpFreq", {{"a", 1}}}};
  }
  return Json::object();
}

}  // namespace

cocoon::llm::MockScript generic_script(const cocoon::ColumnTable& table,
                                       const ScriptOptions& options) {
  using namespace cocoon;
  std::map<std::string, std::vector<std::string>> s;
  auto put = [&](const std::string& step, const std::string& text) {
    s[step] = std::vector<std::string>(options.copies, text);
  };

  const auto names = table.column_names();
  std::string summary = "The table " + table.name() + " has columns";
  for (const auto& n : names) summary += " <u>" + n + "</u>";
  put("ctx.table_summary", summary + ".");

  auto groups = options.groups;
  if (groups.empty()) groups = {names};
  Json leaves = Json::object();
  for (std::size_t i = 0; i < groups.size(); ++i) leaves["G" + std::to_string(i)] = groups[i];
  put("ctx.hierarchy", fenced({{"Table", leaves}}));

  for (std::size_t i = 0; i < groups.size(); ++i) {
    Json sums = Json::object();
    for (const auto& c : groups[i]) sums[c] = "Summary of " + c + ".";
    put("ctx.group_summary:" + generic_leaf(i), fenced(sums));
    Json assignments = Json::array();
    for (const auto& [cols, type] : options.classify) {
      if (std::find(groups[i].begin(), groups[i].end(), cols.front()) != groups[i].end()) {
        assignments.push_back({{"columns", cols}, {"type", type}});
      }
    }
    put("classify.HigherOrder:" + generic_leaf(i), fenced({{"assignments", assignments}}));
  }

  auto add_kind = [&](ErrorKind kind, const std::string& target, PrimitiveType type) {
    Json answer = {{"Thought", "Reasoning about " + target + "."}};
    const Json expectation = expectation_for(kind, type);
    for (const auto& [k, v] : expectation.items()) answer[k] = v;
    const std::string suffix = std::string(to_string(kind)) + ":" + target;
    put("sem." + suffix, fenced(answer));
    const bool err = options.errors.count("review." + suffix) > 0;
    put("review." + suffix,
        fenced({{"is_error", err}, {"reasoning", err ? "Flagged." : "Looks fine."}}));
  };

  add_kind(ErrorKind::Duplication, table.name(), PrimitiveType::String);
  for (const auto& col : table.columns()) {
    for (const auto kind : kAllErrorKinds) {
      if (kind == ErrorKind::Duplication) continue;
      add_kind(kind, col.name(), col.type());
    }
  }
  for (const auto& [cols, type] : options.classify) {
    if (cols.size() < 2) continue;
    add_kind(ErrorKind::UniqueKey, stats::tuple_name(cols), PrimitiveType::String);
    add_kind(ErrorKind::MissingValue, stats::tuple_name(cols), PrimitiveType::String);
  }
  return llm::MockScript{std::move(s)};
}

cocoon::ColumnTable random_table(std::mt19937_64& rng, const RandomTableSpec& spec) {
  using namespace cocoon;
  static const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps",
                                                 "zeta",  "eta",  "theta", "iota",  "kappa"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Column> cols;
  for (std::size_t c = 0; c < spec.columns; ++c) {
    const auto type = static_cast<PrimitiveType>(
        std::uniform_int_distribution<int>(0, 3)(rng));  // boolean, integer, float, string
    std::uniform_int_distribution<std::size_t> pick(0, spec.alphabet - 1);
    std::vector<Value> cells;
    for (std::size_t r = 0; r < spec.rows; ++r) {
      if (unit(rng) < spec.null_rate) {
        cells.emplace_back();
        continue;
      }
      const std::size_t k = pick(rng);
      switch (type) {
        case PrimitiveType::Boolean:
          cells.emplace_back(k % 2 == 0);
          break;
        case PrimitiveType::Integer:
          cells.emplace_back(static_cast<std::int64_t>(k) - 2);
          break;
        case PrimitiveType::Float:
          cells.emplace_back(static_cast<double>(k) * 0.5 - 1.0);
          break;
        default:
          cells.emplace_back(words[k % words.size()]);
          break;
      }
    }
    cols.emplace_back(ColumnSchema{"c" + std::to_string(c), c, type}, std::move(cells));
  }
  return ColumnTable::make("rand", std::move(cols));
}

}  // namespace fixtures
