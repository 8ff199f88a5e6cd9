#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cocoon/json.hpp"
#include "cocoon/llm.hpp"
#include "cocoon/step_id.hpp"
#include "cocoon/table.hpp"

namespace cocoon::context {

// Natural-language description with <u>column</u> spans around column names.
struct TableSummary {
  std::string text;
  bool operator==(const TableSummary&) const = default;
};

// Concept tree. Internal nodes hold children; leaves hold column lists.
struct HierarchyNode {
  std::string name;
  std::vector<HierarchyNode> children;
  std::vector<std::string> columns;

  bool is_leaf() const noexcept { return children.empty(); }
  bool operator==(const HierarchyNode&) const = default;
};

struct LeafGroup {
  std::vector<std::string> path;
  std::vector<std::string> columns;

  // Path joined with '/', e.g. "Patient/Identification".
  std::string id() const;
};

struct AttributeHierarchy {
  std::vector<HierarchyNode> roots;

  // Leaves in depth-first document order.
  std::vector<LeafGroup> leaves() const;
  // The leaf holding `column`, if any.
  std::optional<LeafGroup> leaf_of(std::string_view column) const;
  // {"Concept": {"Sub": ["col", ...]}} as in the exported document.
  Json to_json() const;
  bool operator==(const AttributeHierarchy&) const = default;
};

// Parses the nested-object form; the diagnostic describes the first shape error.
llm::Checked<AttributeHierarchy> parse_hierarchy(const Json& doc);

using ColumnSummaries = std::map<std::string, std::string>;

struct SemanticContext {
  TableSummary table_summary;
  AttributeHierarchy hierarchy;
  ColumnSummaries column_summaries;
  std::optional<std::string> docs;

  bool operator==(const SemanticContext&) const = default;
};

// Column names found inside <u>...</u> spans (span text trimmed, exact match).
std::vector<std::string> underlined_names(std::string_view text);

// nullopt when every column is underlined; otherwise a diagnostic naming each
// missing column. Matching is exact and case-sensitive.
std::optional<std::string> validate_underlines(std::string_view text,
                                               std::span<const std::string> columns);

// nullopt when the leaf lists partition `columns`; otherwise a diagnostic
// listing missing, duplicated and unknown columns.
std::optional<std::string> validate_partition(const AttributeHierarchy& hierarchy,
                                              std::span<const std::string> columns);

// nullopt when `summaries` has a non-empty entry for every column.
std::optional<std::string> validate_column_summaries(const ColumnSummaries& summaries,
                                                     std::span<const std::string> columns);

StepId table_summary_step();
StepId hierarchy_step();
StepId group_summary_step(const LeafGroup& group);
StepId column_summary_step(std::string_view column);

TableSummary summarize_table(const ColumnTable& table, const std::optional<std::string>& docs,
                             llm::LlmClient& client);

AttributeHierarchy group_columns(const ColumnTable& table, const TableSummary& summary,
                                 llm::LlmClient& client);

// One LLM call for a leaf group: summary plus a 10-row projection of the group.
ColumnSummaries summarize_group(const ColumnTable& table, const TableSummary& summary,
                                const LeafGroup& group, llm::LlmClient& client);

// Calls summarize_group for every leaf concurrently and merges the results.
ColumnSummaries summarize_columns(const ColumnTable& table, const TableSummary& summary,
                                  const AttributeHierarchy& hierarchy, llm::LlmClient& client);

struct TableSummaryEdit {
  std::string text;
};
struct HierarchyEdit {
  AttributeHierarchy hierarchy;
};
struct ColumnSummaryEdit {
  std::string column;
  std::string text;
};
using ContextEdit = std::variant<TableSummaryEdit, HierarchyEdit, ColumnSummaryEdit>;

struct EditOutcome {
  SemanticContext context;
  StepId changed;  // the step whose dependents are now stale
};

// Applies a human edit after running the same validators the LLM output must
// pass. Throws EditRejected carrying the validator diagnostic.
EditOutcome apply_user_edit(const SemanticContext& ctx, const ContextEdit& edit,
                            std::span<const std::string> columns);

}  // namespace cocoon::context
