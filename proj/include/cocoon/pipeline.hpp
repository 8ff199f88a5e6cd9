#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cocoon/context.hpp"
#include "cocoon/llm.hpp"
#include "cocoon/profile.hpp"
#include "cocoon/semantics.hpp"
#include "cocoon/step_id.hpp"
#include "cocoon/table.hpp"

namespace cocoon::pipeline {

enum class StepStatus { Pending, Running, Done, Stale, Failed };
std::string_view to_string(StepStatus status);

struct StepRecord {
  StepStatus status = StepStatus::Pending;
  std::string error;  // cause of the last failure
  int runs = 0;       // executions so far
};

struct PlannedStep {
  StepId id;
  std::vector<StepId> deps;
};

// Everything a session knows. Copies are consistent snapshots.
struct SessionState {
  std::shared_ptr<const ColumnTable> table;
  std::optional<std::string> docs;
  std::optional<context::TableSummary> table_summary;
  std::optional<context::AttributeHierarchy> hierarchy;
  context::ColumnSummaries column_summaries;
  std::map<std::string, semantics::HigherOrderAssignment> assignments;  // by leaf group id
  std::map<StepId, stats::StatPayload> stat;
  std::map<StepId, semantics::SemProfile> sem;
  std::map<StepId, semantics::ReviewVerdict> verdicts;
  std::map<StepId, StepRecord> steps;
  std::optional<llm::ProviderKind> provider_kind;
  std::uint64_t revision = 0;

  // Context assembled from whatever parts exist so far.
  context::SemanticContext context() const;
  // Every higher-order assignment merged in leaf order.
  semantics::HigherOrderAssignment assignment() const;
  StepStatus status(const StepId& id) const;
};

// The step graph implied by the current state, in topological order:
//   ctx.table_summary -> ctx.hierarchy -> ctx.group_summary:<leaf> -> ctx.column_summary:<col>
//   classify.HigherOrder:<leaf>  needs the hierarchy and the leaf's group summary
//   stat.<kind>:<target>         needs nothing but the table
//   sem.<kind>:<target>          needs the table summary (table level) or the member
//                                column summaries and the leaf's classification
//   review.<kind>:<target>       needs stat and sem of the same kind and target
// Groups and columns appear once the hierarchy exists; coordinate-pair targets
// once their leaf is classified.
std::vector<PlannedStep> plan_steps(const SessionState& state);

struct RunReport {
  std::vector<StepId> executed;  // commit order
  std::map<StepId, std::string> failed;

  bool ok() const noexcept { return failed.empty(); }
  // Throws StepFailed for the first failure, if any.
  void throw_if_failed() const;
};

class Session {
 public:
  // `client` may be null; LLM steps then fail while statistical ones still run.
  Session(ColumnTable table, std::shared_ptr<llm::LlmClient> client,
          std::optional<std::string> docs = std::nullopt);

  SessionState snapshot() const;
  const ColumnTable& table() const noexcept { return *table_; }
  bool running() const noexcept { return running_.load(); }
  std::uint64_t revision() const;

  // Executes ready steps in waves until nothing is runnable. `until` is a step
  // id or a glob over step ids (e.g. "ctx.*"); only matching steps and their
  // dependencies run. Failed steps leave their dependents pending.
  // Throws ConflictError when a run is already in progress.
  RunReport run(const std::optional<std::string>& until = std::nullopt);

  // Marks every transitive dependent of `changed` stale; returns them.
  std::vector<StepId> invalidate_downstream(const StepId& changed);

  // Validates and applies a human context edit, then invalidates downstream.
  // Throws EditRejected or ConflictError. Returns the newly stale steps.
  std::vector<StepId> edit_context(const context::ContextEdit& edit);

  // Replaces the machine decision. Throws UnknownStep or AlreadyFinalized.
  semantics::ReviewVerdict override_verdict(const StepId& step, bool is_error,
                                            const std::string& note);

 private:
  struct Outcome;
  Outcome execute(const StepId& id, const SessionState& inputs) const;
  void commit(const StepId& id, Outcome& outcome);
  void sync_plan_locked();
  std::vector<StepId> invalidate_locked(const StepId& changed);

  std::shared_ptr<const ColumnTable> table_;
  std::shared_ptr<llm::LlmClient> client_;
  mutable std::mutex mu_;
  SessionState state_;
  std::vector<PlannedStep> plan_;
  std::atomic<bool> running_{false};
};

inline RunReport run_pipeline(Session& s, const std::optional<std::string>& until = std::nullopt) {
  return s.run(until);
}
inline std::vector<StepId> invalidate_downstream(Session& s, const StepId& changed) {
  return s.invalidate_downstream(changed);
}
inline semantics::ReviewVerdict apply_verdict_override(Session& s, const StepId& step,
                                                       bool accepted_as_error,
                                                       const std::string& note) {
  return s.override_verdict(step, accepted_as_error, note);
}

// Glob with '*' matching any run of characters.
bool step_matches(std::string_view pattern, std::string_view step);

struct AlertNode {
  std::string name;
  int count = 0;
  bool is_column = false;
  std::vector<AlertNode> children;

  const AlertNode* find(std::string_view name) const;  // depth-first
  Json to_json() const;
};

// Tree rooted at the table: hierarchy concepts, then columns. Each node counts
// effective is_error verdicts among its descendant columns; table-level verdicts
// count at the root only. Only verdicts of done review steps count.
AlertNode alert_counts(const SessionState& state);
inline AlertNode alert_counts(const Session& s) { return alert_counts(s.snapshot()); }

}  // namespace cocoon::pipeline
