#include "cocoon/context.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "cocoon/csv.hpp"
#include "cocoon/text_table.hpp"

namespace cocoon::context {

namespace {

constexpr std::string_view kSystem =
    "You are an expert data analyst helping to profile a relational table. "
    "Be precise and concise.";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string join(std::span<const std::string> items, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

// Plain text answer; a fenced block, when present, wins.
std::string strip_fences(std::string_view raw) {
  const auto open = raw.find("```");
  if (open != std::string_view::npos) {
    const auto body = raw.find('\n', open);
    const auto close = body == std::string_view::npos ? body : raw.find("```", body + 1);
    if (close != std::string_view::npos) return trim(raw.substr(body + 1, close - body - 1));
  }
  return trim(raw);
}

llm::Checked<HierarchyNode> parse_node(const std::string& name, const Json& value) {
  HierarchyNode node;
  node.name = name;
  if (value.is_array()) {
    if (value.empty()) return llm::Checked<HierarchyNode>::fail("concept '" + name + "' lists no columns");
    for (const auto& item : value) {
      if (!item.is_string()) {
        return llm::Checked<HierarchyNode>::fail("concept '" + name +
                                                 "' must list column names as strings");
      }
      node.columns.push_back(item.get<std::string>());
    }
    return llm::Checked<HierarchyNode>::ok(std::move(node));
  }
  if (value.is_object()) {
    if (value.empty()) return llm::Checked<HierarchyNode>::fail("concept '" + name + "' is empty");
    for (const auto& [child_name, child] : value.items()) {
      auto parsed = parse_node(child_name, child);
      if (!parsed.value) return parsed;
      node.children.push_back(std::move(*parsed.value));
    }
    return llm::Checked<HierarchyNode>::ok(std::move(node));
  }
  return llm::Checked<HierarchyNode>::fail(
      "concept '" + name + "' must map to an object of sub-concepts or a list of columns");
}

void collect_leaves(const HierarchyNode& node, std::vector<std::string>& path,
                    std::vector<LeafGroup>& out) {
  path.push_back(node.name);
  if (node.is_leaf()) {
    out.push_back({path, node.columns});
  } else {
    for (const auto& child : node.children) collect_leaves(child, path, out);
  }
  path.pop_back();
}

Json node_json(const HierarchyNode& node) {
  if (node.is_leaf()) return Json(node.columns);
  Json out = Json::object();
  for (const auto& child : node.children) out[child.name] = node_json(child);
  return out;
}

}  // namespace

std::string LeafGroup::id() const { return join(path, "/"); }

std::vector<LeafGroup> AttributeHierarchy::leaves() const {
  std::vector<LeafGroup> out;
  std::vector<std::string> path;
  for (const auto& root : roots) collect_leaves(root, path, out);
  return out;
}

std::optional<LeafGroup> AttributeHierarchy::leaf_of(std::string_view column) const {
  for (auto& leaf : leaves()) {
    if (std::find(leaf.columns.begin(), leaf.columns.end(), column) != leaf.columns.end()) {
      return leaf;
    }
  }
  return std::nullopt;
}

Json AttributeHierarchy::to_json() const {
  Json out = Json::object();
  for (const auto& root : roots) out[root.name] = node_json(root);
  return out;
}

llm::Checked<AttributeHierarchy> parse_hierarchy(const Json& doc) {
  using Result = llm::Checked<AttributeHierarchy>;
  if (!doc.is_object() || doc.empty()) {
    return Result::fail("the hierarchy must be a non-empty JSON object of concepts");
  }
  AttributeHierarchy h;
  for (const auto& [name, value] : doc.items()) {
    auto node = parse_node(name, value);
    if (!node.value) return Result::fail(node.diagnostic);
    h.roots.push_back(std::move(*node.value));
  }
  return Result::ok(std::move(h));
}

std::vector<std::string> underlined_names(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("<u>", pos);
    if (open == std::string_view::npos) break;
    const auto close = text.find("</u>", open + 3);
    if (close == std::string_view::npos) break;
    out.push_back(trim(text.substr(open + 3, close - open - 3)));
    pos = close + 4;
  }
  return out;
}

std::optional<std::string> validate_underlines(std::string_view text,
                                               std::span<const std::string> columns) {
  const auto names = underlined_names(text);
  const std::set<std::string> present(names.begin(), names.end());
  std::vector<std::string> missing;
  for (const auto& c : columns) {
    if (!present.count(c)) missing.push_back(c);
  }
  if (missing.empty()) return std::nullopt;
  return "these columns are not underlined with <u></u> in the summary (names are "
         "case-sensitive): " +
         join(missing);
}

std::optional<std::string> validate_partition(const AttributeHierarchy& hierarchy,
                                              std::span<const std::string> columns) {
  const std::set<std::string> schema(columns.begin(), columns.end());
  std::map<std::string, int> seen;
  std::vector<std::string> unknown, duplicated, missing;
  for (const auto& leaf : hierarchy.leaves()) {
    for (const auto& c : leaf.columns) {
      if (!schema.count(c)) {
        if (std::find(unknown.begin(), unknown.end(), c) == unknown.end()) unknown.push_back(c);
        continue;
      }
      if (++seen[c] == 2) duplicated.push_back(c);
    }
  }
  for (const auto& c : columns) {
    if (!seen.count(c)) missing.push_back(c);
  }
  if (missing.empty() && duplicated.empty() && unknown.empty()) return std::nullopt;
  std::vector<std::string> parts;
  if (!missing.empty()) parts.push_back("missing columns: [" + join(missing) + "]");
  if (!duplicated.empty()) {
    parts.push_back("duplicated columns (must appear in exactly one list): [" + join(duplicated) +
                    "]");
  }
  if (!unknown.empty()) parts.push_back("unknown columns: [" + join(unknown) + "]");
  return join(parts, "; ");
}

std::optional<std::string> validate_column_summaries(const ColumnSummaries& summaries,
                                                     std::span<const std::string> columns) {
  std::vector<std::string> missing;
  for (const auto& c : columns) {
    const auto it = summaries.find(c);
    if (it == summaries.end() || trim(it->second).empty()) missing.push_back(c);
  }
  if (missing.empty()) return std::nullopt;
  return "missing column summaries for: " + join(missing);
}

StepId table_summary_step() { return {std::string(phase::kContext), "table_summary", ""}; }
StepId hierarchy_step() { return {std::string(phase::kContext), "hierarchy", ""}; }
StepId group_summary_step(const LeafGroup& group) {
  return {std::string(phase::kContext), "group_summary", group.id()};
}
StepId column_summary_step(std::string_view column) {
  return {std::string(phase::kContext), "column_summary", std::string(column)};
}

TableSummary summarize_table(const ColumnTable& table, const std::optional<std::string>& docs,
                             llm::LlmClient& client) {
  const auto columns = table.column_names();
  std::string user = "Table name: " + table.name() + "\nColumns: " + join(columns) +
                     "\n\nFirst five rows:\n" + render_projection(table, columns, 5);
  if (docs && !trim(*docs).empty()) user += "\nDocumentation provided by the user:\n" + *docs + "\n";
  user +=
      "\nSummarize the high-level idea of this table in a short paragraph. Mention every column "
      "and explain how the columns relate, wrapping each column name exactly as written in "
      "<u></u>, for example <u>" +
      columns.front() + "</u>.";
  llm::ChatRequest req{table_summary_step().str(), std::string(kSystem), std::move(user),
                       "Plain text paragraph; every column name underlined as <u>name</u>."};
  llm::Validator<TableSummary> check = [&columns](const std::string& raw) {
    std::string text = strip_fences(raw);
    if (text.empty()) return llm::Checked<TableSummary>::fail("the summary is empty");
    if (auto diag = validate_underlines(text, columns)) return llm::Checked<TableSummary>::fail(*diag);
    return llm::Checked<TableSummary>::ok(TableSummary{std::move(text)});
  };
  return client.complete_validated(req, check).parsed;
}

AttributeHierarchy group_columns(const ColumnTable& table, const TableSummary& summary,
                                 llm::LlmClient& client) {
  const auto columns = table.column_names();
  std::string user =
      "Table summary:\n" + summary.text + "\n\nColumns: " + join(columns) +
      "\n\nGroup the columns into a hierarchy of semantic concepts. Use nested JSON objects for "
      "concepts and sub-concepts; the final level must be a list of column names. Each column "
      "must appear in exactly one list. Columns that together express one concept (for example "
      "longitude and latitude) belong in the same list.";
  llm::ChatRequest req{hierarchy_step().str(), std::string(kSystem), std::move(user),
                       "```json\n{\"Concept\": {\"Sub-concept\": [\"column\", ...]}, ...}\n```"};
  llm::Validator<AttributeHierarchy> check = [&columns](const std::string& raw) {
    using R = llm::Checked<AttributeHierarchy>;
    Json doc;
    try {
      doc = llm::extract_fenced_json(raw);
    } catch (const NoStructuredContent& e) {
      return R::fail(e.what());
    }
    auto parsed = parse_hierarchy(doc);
    if (!parsed.value) return parsed;
    if (auto diag = validate_partition(*parsed.value, columns)) return R::fail(*diag);
    return parsed;
  };
  return client.complete_validated(req, check).parsed;
}

ColumnSummaries summarize_group(const ColumnTable& table, const TableSummary& summary,
                                const LeafGroup& group, llm::LlmClient& client) {
  const auto& cols = group.columns;
  std::string user = "Table summary:\n" + summary.text + "\n\nColumn group '" + group.id() +
                     "' with sample rows:\n" + render_projection(table, cols, 10) +
                     "\nSummarize the meaning of each column in this group in one sentence.";
  llm::ChatRequest req{group_summary_step(group).str(), std::string(kSystem), std::move(user),
                       "```json\n{\"column name\": \"one-sentence meaning\", ...}\n```"};
  llm::Validator<ColumnSummaries> check = [&cols](const std::string& raw) {
    using R = llm::Checked<ColumnSummaries>;
    Json doc;
    try {
      doc = llm::extract_fenced_json(raw);
    } catch (const NoStructuredContent& e) {
      return R::fail(e.what());
    }
    if (!doc.is_object()) return R::fail("expected a JSON object mapping column name to summary");
    ColumnSummaries out;
    std::vector<std::string> unexpected;
    for (const auto& [k, v] : doc.items()) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) {
        unexpected.push_back(k);
        continue;
      }
      if (!v.is_string()) return R::fail("summary for " + k + " must be a string");
      out[k] = v.get<std::string>();
    }
    if (!unexpected.empty()) {
      return R::fail("columns not in this group: " + join(unexpected) +
                     "; summarize only: " + join(cols));
    }
    if (auto diag = validate_column_summaries(out, cols)) return R::fail(*diag);
    return R::ok(std::move(out));
  };
  return client.complete_validated(req, check).parsed;
}

ColumnSummaries summarize_columns(const ColumnTable& table, const TableSummary& summary,
                                  const AttributeHierarchy& hierarchy, llm::LlmClient& client) {
  const auto leaves = hierarchy.leaves();
  std::vector<std::future<ColumnSummaries>> jobs;
  jobs.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    jobs.push_back(std::async(std::launch::async, [&table, &summary, &client, leaf] {
      return summarize_group(table, summary, leaf, client);
    }));
  }
  ColumnSummaries merged;
  for (auto& job : jobs) {
    for (auto& [k, v] : job.get()) merged[k] = std::move(v);
  }
  const auto columns = table.column_names();
  if (auto diag = validate_column_summaries(merged, columns)) {
    throw ValidationExhausted("ctx.column_summary", {*diag});
  }
  return merged;
}

EditOutcome apply_user_edit(const SemanticContext& ctx, const ContextEdit& edit,
                            std::span<const std::string> columns) {
  EditOutcome out{ctx, {}};
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TableSummaryEdit>) {
          if (trim(e.text).empty()) throw EditRejected("the summary is empty");
          if (auto diag = validate_underlines(e.text, columns)) throw EditRejected(*diag);
          out.context.table_summary = TableSummary{e.text};
          out.changed = table_summary_step();
        } else if constexpr (std::is_same_v<T, HierarchyEdit>) {
          if (auto diag = validate_partition(e.hierarchy, columns)) throw EditRejected(*diag);
          out.context.hierarchy = e.hierarchy;
          out.changed = hierarchy_step();
        } else {
          if (std::find(columns.begin(), columns.end(), e.column) == columns.end()) {
            throw EditRejected("unknown column: " + e.column);
          }
          if (trim(e.text).empty()) throw EditRejected("summary for " + e.column + " is empty");
          out.context.column_summaries[e.column] = e.text;
          out.changed = column_summary_step(e.column);
        }
      },
      edit);
  return out;
}

}  // namespace cocoon::context
