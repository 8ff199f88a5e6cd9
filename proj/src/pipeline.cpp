#include "cocoon/pipeline.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <thread>

namespace cocoon::pipeline {

namespace {

constexpr std::size_t kMaxWorkers = 16;

bool is_llm_phase(const StepId& id) {
  if (id.phase == phase::kStat) return false;
  return !(id.phase == phase::kContext && id.kind == "column_summary");
}

StepId stat_step(ErrorKind kind, std::string_view target) {
  return {std::string(phase::kStat), std::string(to_string(kind)), std::string(target)};
}

stats::Target resolve_target(const ColumnTable& table, ErrorKind kind, const std::string& name) {
  if (kind == ErrorKind::Duplication) return table_target(table);
  if (table.find_column(name)) return stats::column_target(table, name);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = name.find('+', start);
    parts.push_back(name.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return stats::tuple_target(table, parts);
}

std::optional<context::LeafGroup> find_leaf(const SessionState& s, const std::string& id) {
  if (!s.hierarchy) return std::nullopt;
  for (auto& leaf : s.hierarchy->leaves()) {
    if (leaf.id() == id) return leaf;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::Pending: return "pending";
    case StepStatus::Running: return "running";
    case StepStatus::Done: return "done";
    case StepStatus::Stale: return "stale";
    case StepStatus::Failed: return "failed";
  }
  return "pending";
}

context::SemanticContext SessionState::context() const {
  context::SemanticContext ctx;
  if (table_summary) ctx.table_summary = *table_summary;
  if (hierarchy) ctx.hierarchy = *hierarchy;
  ctx.column_summaries = column_summaries;
  ctx.docs = docs;
  return ctx;
}

semantics::HigherOrderAssignment SessionState::assignment() const {
  semantics::HigherOrderAssignment out;
  if (hierarchy) {
    for (const auto& leaf : hierarchy->leaves()) {
      const auto it = assignments.find(leaf.id());
      if (it != assignments.end()) out.merge(it->second);
    }
  } else {
    for (const auto& [id, a] : assignments) out.merge(a);
  }
  return out;
}

StepStatus SessionState::status(const StepId& id) const {
  const auto it = steps.find(id);
  return it == steps.end() ? StepStatus::Pending : it->second.status;
}

std::vector<PlannedStep> plan_steps(const SessionState& state) {
  const ColumnTable& table = *state.table;
  std::vector<PlannedStep> plan;
  const StepId ts = context::table_summary_step();
  const StepId hs = context::hierarchy_step();
  plan.push_back({ts, {}});
  plan.push_back({hs, {ts}});

  std::vector<context::LeafGroup> leaves;
  if (state.hierarchy) leaves = state.hierarchy->leaves();
  for (const auto& leaf : leaves) {
    const StepId gs = context::group_summary_step(leaf);
    plan.push_back({gs, {hs}});
    for (const auto& c : leaf.columns) plan.push_back({context::column_summary_step(c), {gs}});
  }
  for (const auto& leaf : leaves) {
    plan.push_back({semantics::classify_step(leaf), {hs, context::group_summary_step(leaf)}});
  }

  auto add_kind = [&](ErrorKind kind, const std::string& target, std::vector<StepId> sem_deps,
                      bool with_semantics) {
    const StepId st = stat_step(kind, target);
    plan.push_back({st, {}});
    if (!with_semantics) return;
    const StepId se = semantics::profile_step(kind, target);
    plan.push_back({se, std::move(sem_deps)});
    plan.push_back({semantics::review_step(kind, target), {st, se}});
  };

  add_kind(ErrorKind::Duplication, table.name(), {ts}, true);

  auto add_columns = [&](const std::vector<std::string>& columns,
                         const context::LeafGroup* leaf) {
    for (const auto& c : columns) {
      const auto target = stats::column_target(table, c);
      for (auto kind : kAllErrorKinds) {
        if (kind == ErrorKind::Duplication || !kind_applies(kind, table, target)) continue;
        std::vector<StepId> deps;
        if (leaf) deps = {context::column_summary_step(c), semantics::classify_step(*leaf)};
        add_kind(kind, c, std::move(deps), leaf != nullptr);
      }
    }
    if (!leaf) return;
    const auto it = state.assignments.find(leaf->id());
    if (it == state.assignments.end()) return;
    for (const auto& group : it->second.groups()) {
      const auto target = stats::tuple_target(table, group.columns);
      for (auto kind : {ErrorKind::UniqueKey, ErrorKind::MissingValue}) {
        if (!kind_applies(kind, table, target)) continue;
        std::vector<StepId> deps;
        for (const auto& c : group.columns) deps.push_back(context::column_summary_step(c));
        deps.push_back(semantics::classify_step(*leaf));
        add_kind(kind, target.name, std::move(deps), true);
      }
    }
  };

  if (leaves.empty()) {
    add_columns(table.column_names(), nullptr);
  } else {
    for (const auto& leaf : leaves) add_columns(leaf.columns, &leaf);
  }
  return plan;
}

void RunReport::throw_if_failed() const {
  if (failed.empty()) return;
  const auto& [id, cause] = *failed.begin();
  throw StepFailed(id.str(), cause);
}

bool step_matches(std::string_view pattern, std::string_view step) {
  // Iterative glob with backtracking to the last '*'.
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < step.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pattern.size() && pattern[p] == step[s]) {
      ++p;
      ++s;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

namespace {

// Whether the phase part of a step pattern can match any pipeline phase.
bool names_known_phase(std::string_view pattern) {
  const auto phase = pattern.substr(0, pattern.find('.'));
  for (std::string_view p : {"ctx", "classify", "stat", "sem", "review"}) {
    if (step_matches(phase, p)) return true;
  }
  return false;
}

}  // namespace

struct Session::Outcome {
  std::optional<std::string> error;
  std::optional<context::TableSummary> table_summary;
  std::optional<context::AttributeHierarchy> hierarchy;
  std::optional<context::ColumnSummaries> summaries;
  std::optional<semantics::HigherOrderAssignment> assignment;
  std::optional<stats::StatPayload> stat;
  std::optional<semantics::SemProfile> sem;
  std::optional<semantics::ReviewVerdict> verdict;
};

Session::Session(ColumnTable table, std::shared_ptr<llm::LlmClient> client,
                 std::optional<std::string> docs)
    : table_(std::make_shared<const ColumnTable>(std::move(table))), client_(std::move(client)) {
  state_.table = table_;
  state_.docs = std::move(docs);
  if (client_) state_.provider_kind = client_->provider().kind();
  sync_plan_locked();
}

SessionState Session::snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::uint64_t Session::revision() const {
  std::lock_guard lock(mu_);
  return state_.revision;
}

void Session::sync_plan_locked() {
  plan_ = plan_steps(state_);
  std::set<StepId> live;
  for (const auto& p : plan_) {
    live.insert(p.id);
    state_.steps.try_emplace(p.id);
  }
  for (auto it = state_.steps.begin(); it != state_.steps.end();) {
    if (live.count(it->first)) {
      ++it;
      continue;
    }
    state_.stat.erase(it->first);
    state_.sem.erase(it->first);
    state_.verdicts.erase(it->first);
    it = state_.steps.erase(it);
  }
  // A done step whose inputs are not done is out of date. One pass suffices
  // because the plan is in topological order.
  for (const auto& p : plan_) {
    auto& rec = state_.steps[p.id];
    if (rec.status != StepStatus::Done) continue;
    for (const auto& d : p.deps) {
      if (state_.steps[d].status != StepStatus::Done) {
        rec.status = StepStatus::Stale;
        break;
      }
    }
  }
}

Session::Outcome Session::execute(const StepId& id, const SessionState& in) const {
  Outcome out;
  try {
    if (is_llm_phase(id) && !client_) throw ConfigError("no LLM provider configured");
    const ColumnTable& table = *table_;
    if (id.phase == phase::kContext) {
      if (id.kind == "table_summary") {
        out.table_summary = context::summarize_table(table, in.docs, *client_);
      } else if (id.kind == "hierarchy") {
        out.hierarchy = context::group_columns(table, *in.table_summary, *client_);
      } else if (id.kind == "group_summary") {
        const auto leaf = find_leaf(in, id.target);
        if (!leaf) throw UnknownStep(id.str());
        out.summaries = context::summarize_group(table, *in.table_summary, *leaf, *client_);
      } else {
        const auto it = in.column_summaries.find(id.target);
        if (it == in.column_summaries.end() || it->second.empty()) {
          throw ValidationExhausted(id.str(), {"no summary for column " + id.target});
        }
      }
    } else if (id.phase == phase::kClassify) {
      const auto leaf = find_leaf(in, id.target);
      if (!leaf) throw UnknownStep(id.str());
      out.assignment = semantics::classify_higher_order(*leaf, in.context(), table, *client_);
    } else {
      const auto kind = error_kind_from_string(id.kind);
      if (!kind) throw UnknownStep(id.str());
      const auto target = resolve_target(table, *kind, id.target);
      if (id.phase == phase::kStat) {
        out.stat = compute_stat(*kind, table, target);
      } else if (id.phase == phase::kSem) {
        out.sem = semantics::semantic_profile(*kind, target, in.context(), table, *client_);
      } else {
        const auto& stat = in.stat.at(stat_step(*kind, id.target));
        const auto& sem = in.sem.at(semantics::profile_step(*kind, id.target));
        const auto ctx = in.context();
        out.verdict = semantics::semantic_review(stat, sem, table, &ctx, *client_);
      }
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

void Session::commit(const StepId& id, Outcome& out) {
  auto& rec = state_.steps[id];
  ++rec.runs;
  if (out.error) {
    rec.status = StepStatus::Failed;
    rec.error = *out.error;
    return;
  }
  rec.status = StepStatus::Done;
  rec.error.clear();
  if (out.table_summary) state_.table_summary = std::move(*out.table_summary);
  if (out.hierarchy) state_.hierarchy = std::move(*out.hierarchy);
  if (out.summaries) {
    for (auto& [k, v] : *out.summaries) state_.column_summaries[k] = std::move(v);
  }
  if (out.assignment) state_.assignments[id.target] = std::move(*out.assignment);
  if (out.stat) state_.stat.insert_or_assign(id, std::move(*out.stat));
  if (out.sem) state_.sem.insert_or_assign(id, std::move(*out.sem));
  if (out.verdict) state_.verdicts.insert_or_assign(id, std::move(*out.verdict));
}

RunReport Session::run(const std::optional<std::string>& until) {
  if (running_.exchange(true)) throw ConflictError("a pipeline run is already in progress");
  struct Reset {
    std::atomic<bool>& flag;
    ~Reset() { flag = false; }
  } reset{running_};

  RunReport report;
  std::set<StepId> attempted;
  while (true) {
    std::vector<StepId> ready;
    SessionState inputs;
    {
      std::lock_guard lock(mu_);
      sync_plan_locked();
      std::map<StepId, const PlannedStep*> by_id;
      for (const auto& p : plan_) by_id[p.id] = &p;

      std::set<StepId> selected;
      if (until) {
        std::deque<StepId> queue;
        for (const auto& p : plan_) {
          if (step_matches(*until, p.id.str())) queue.push_back(p.id);
        }
        // Semantic and review steps are planned only once their leaf is
        // classified; until they exist, work towards the full plan.
        if (queue.empty() && names_known_phase(*until)) {
          for (const auto& p : plan_) {
            if (p.id.phase == "ctx" || p.id.phase == "classify") queue.push_back(p.id);
          }
        }
        while (!queue.empty()) {
          StepId id = queue.front();
          queue.pop_front();
          if (!selected.insert(id).second) continue;
          for (const auto& d : by_id.at(id)->deps) queue.push_back(d);
        }
      }
      for (const auto& p : plan_) {
        if (until && !selected.count(p.id)) continue;
        if (attempted.count(p.id)) continue;
        const auto status = state_.steps[p.id].status;
        if (status == StepStatus::Done || status == StepStatus::Running) continue;
        const bool deps_done = std::all_of(p.deps.begin(), p.deps.end(), [&](const StepId& d) {
          return state_.steps[d].status == StepStatus::Done;
        });
        if (deps_done) ready.push_back(p.id);
      }
      if (ready.empty()) break;
      for (const auto& id : ready) {
        state_.steps[id].status = StepStatus::Running;
        attempted.insert(id);
      }
      inputs = state_;
    }

    std::vector<Outcome> outcomes(ready.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < ready.size();) {
        outcomes[i] = execute(ready[i], inputs);
      }
    };
    const std::size_t n_workers = std::min(ready.size(), kMaxWorkers);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < ready.size(); ++i) {
      commit(ready[i], outcomes[i]);
      report.executed.push_back(ready[i]);
      if (outcomes[i].error) report.failed[ready[i]] = *outcomes[i].error;
    }
    ++state_.revision;
  }
  return report;
}

std::vector<StepId> Session::invalidate_locked(const StepId& changed) {
  std::map<StepId, std::vector<StepId>> reverse;
  for (const auto& p : plan_) {
    for (const auto& d : p.deps) reverse[d].push_back(p.id);
  }
  std::set<StepId> reached;
  std::deque<StepId> queue{changed};
  while (!queue.empty()) {
    const StepId id = queue.front();
    queue.pop_front();
    for (const auto& next : reverse[id]) {
      if (reached.insert(next).second) queue.push_back(next);
    }
  }
  std::vector<StepId> out;
  for (const auto& p : plan_) {
    if (!reached.count(p.id)) continue;
    auto& rec = state_.steps[p.id];
    if (rec.status == StepStatus::Done || rec.status == StepStatus::Failed) {
      rec.status = StepStatus::Stale;
    }
    if (rec.status == StepStatus::Stale) out.push_back(p.id);
  }
  return out;
}

std::vector<StepId> Session::invalidate_downstream(const StepId& changed) {
  if (running_) throw ConflictError("a pipeline run is in progress");
  std::lock_guard lock(mu_);
  if (!state_.steps.count(changed)) throw UnknownStep(changed.str());
  auto out = invalidate_locked(changed);
  ++state_.revision;
  return out;
}

std::vector<StepId> Session::edit_context(const context::ContextEdit& edit) {
  if (running_) throw ConflictError("a pipeline run is in progress");
  std::lock_guard lock(mu_);
  const auto columns = table_->column_names();
  auto outcome = context::apply_user_edit(state_.context(), edit, columns);
  if (std::holds_alternative<context::TableSummaryEdit>(edit)) {
    state_.table_summary = outcome.context.table_summary;
  } else if (std::holds_alternative<context::HierarchyEdit>(edit)) {
    state_.hierarchy = outcome.context.hierarchy;
  } else {
    state_.column_summaries = outcome.context.column_summaries;
  }
  auto stale = invalidate_locked(outcome.changed);
  auto& rec = state_.steps[outcome.changed];
  rec.status = StepStatus::Done;
  rec.error.clear();
  sync_plan_locked();
  ++state_.revision;
  // Report what is stale under the new plan.
  std::vector<StepId> out;
  for (const auto& id : stale) {
    if (state_.steps.count(id) && state_.steps[id].status == StepStatus::Stale) out.push_back(id);
  }
  return out;
}

semantics::ReviewVerdict Session::override_verdict(const StepId& step, bool is_error,
                                                   const std::string& note) {
  std::lock_guard lock(mu_);
  const auto it = state_.verdicts.find(step);
  if (it == state_.verdicts.end()) throw UnknownStep(step.str());
  auto& v = it->second;
  if (v.status != semantics::VerdictStatus::Machine) {
    throw AlreadyFinalized(step.str() + " was already " +
                           std::string(semantics::to_string(v.status)));
  }
  v.machine_is_error = v.is_error;
  v.status = is_error == v.is_error ? semantics::VerdictStatus::Accepted
                                    : semantics::VerdictStatus::Overridden;
  v.is_error = is_error;
  v.note = note;
  if (!note.empty()) v.reasoning += "\nReviewer note: " + note;
  ++state_.revision;
  return v;
}

const AlertNode* AlertNode::find(std::string_view target) const {
  if (name == target) return this;
  for (const auto& c : children) {
    if (const auto* hit = c.find(target)) return hit;
  }
  return nullptr;
}

Json AlertNode::to_json() const {
  Json j = {{"name", name}, {"count", count}};
  if (is_column) j["column"] = true;
  if (!children.empty()) {
    Json kids = Json::array();
    for (const auto& c : children) kids.push_back(c.to_json());
    j["children"] = std::move(kids);
  }
  return j;
}

namespace {

struct Alert {
  bool table_level = false;
  std::set<std::string> columns;
};

AlertNode column_node(const std::string& c, const std::vector<Alert>& alerts) {
  AlertNode n{c, 0, true, {}};
  for (const auto& a : alerts) n.count += a.columns.count(c) ? 1 : 0;
  return n;
}

// Fills `node` and returns the columns below it.
std::set<std::string> build_node(const context::HierarchyNode& h, const std::vector<Alert>& alerts,
                                 AlertNode& node) {
  node.name = h.name;
  std::set<std::string> below;
  if (h.is_leaf()) {
    for (const auto& c : h.columns) {
      node.children.push_back(column_node(c, alerts));
      below.insert(c);
    }
  } else {
    for (const auto& child : h.children) {
      AlertNode sub;
      auto cols = build_node(child, alerts, sub);
      below.insert(cols.begin(), cols.end());
      node.children.push_back(std::move(sub));
    }
  }
  for (const auto& a : alerts) {
    const bool hit = std::any_of(a.columns.begin(), a.columns.end(),
                                 [&](const std::string& c) { return below.count(c) > 0; });
    node.count += hit ? 1 : 0;
  }
  return below;
}

}  // namespace

AlertNode alert_counts(const SessionState& state) {
  const ColumnTable& table = *state.table;
  std::vector<Alert> alerts;
  for (const auto& [id, v] : state.verdicts) {
    if (!v.is_error || state.status(id) != StepStatus::Done) continue;
    Alert a;
    if (v.kind == ErrorKind::Duplication) {
      a.table_level = true;
    } else {
      for (auto idx : resolve_target(table, v.kind, v.target).columns) {
        a.columns.insert(table.column(idx).schema().name);
      }
    }
    alerts.push_back(std::move(a));
  }
  AlertNode root{table.name(), static_cast<int>(alerts.size()), false, {}};
  if (state.hierarchy) {
    for (const auto& h : state.hierarchy->roots) {
      AlertNode sub;
      build_node(h, alerts, sub);
      root.children.push_back(std::move(sub));
    }
  } else {
    for (const auto& c : table.column_names()) root.children.push_back(column_node(c, alerts));
  }
  return root;
}

}  // namespace cocoon::pipeline
