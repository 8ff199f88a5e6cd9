#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cocoon/context.hpp"
#include "cocoon/llm.hpp"
#include "cocoon/profile.hpp"
#include "cocoon/step_id.hpp"

namespace cocoon::semantics {

// Expected shape of the data for one error kind, as produced by the LLM.
struct ExpDuplicate {
  bool expected = false;
  bool operator==(const ExpDuplicate&) const = default;
};
struct ExpType {
  PrimitiveType type = PrimitiveType::String;
  bool operator==(const ExpType&) const = default;
};
struct ExpUnique {
  bool expected = false;
  bool operator==(const ExpUnique&) const = default;
};
struct PotentialDmv {
  std::vector<std::string> values;
  bool operator==(const PotentialDmv&) const = default;
};
struct AllowMissing {
  bool allowed = false;
  bool operator==(const AllowMissing&) const = default;
};
struct ExpQuantile {
  std::array<double, 5> quantile{};
  bool operator==(const ExpQuantile&) const = default;
};
struct ExpStr {
  std::vector<std::string> examples;
  bool operator==(const ExpStr&) const = default;
};
// Relative weights normalized to sum to 1, in the order the LLM listed them.
struct ExpFreq {
  std::vector<std::pair<std::string, double>> weights;
  bool operator==(const ExpFreq&) const = default;
};

// Alternatives follow ErrorKind order.
using Expectation = std::variant<ExpDuplicate, ExpType, ExpUnique, PotentialDmv, AllowMissing,
                                 ExpQuantile, ExpStr, ExpFreq>;

ErrorKind kind_of(const Expectation& e);
// {"ExpDuplicate": true}, {"ExpQuantile": [..]}, ...
Json expectation_to_json(const Expectation& e);
// Parses the kind's field out of an LLM answer object; the diagnostic names the
// offending field.
llm::Checked<Expectation> expectation_from_json(ErrorKind kind, const Json& doc);

struct SemProfile {
  ErrorKind kind = ErrorKind::Duplication;
  std::string target;
  Expectation expectation;
  std::string thought;
  bool operator==(const SemProfile&) const = default;
};

enum class VerdictStatus { Machine, Accepted, Overridden };
std::string_view to_string(VerdictStatus status);
std::optional<VerdictStatus> verdict_status_from_string(std::string_view name);

struct ReviewVerdict {
  ErrorKind kind = ErrorKind::Duplication;
  std::string target;
  bool is_error = false;
  std::string reasoning;
  VerdictStatus status = VerdictStatus::Machine;
  std::string note;
  // The machine decision, kept when a human overrides it.
  bool machine_is_error = false;
  // True when the statistics showed nothing to review and no LLM call was made.
  bool gated = false;
  bool operator==(const ReviewVerdict&) const = default;
};

inline constexpr std::string_view kNoDiscrepancy = "no statistical discrepancy";

enum class HigherOrderType { ZipCode, FipsCode, CountryName, UsStateName, LatLong, Category, FreeText };
std::string_view to_string(HigherOrderType type);
// Accepts the display names ("zip code", "lat/long coordinates", ...) case-insensitively.
std::optional<HigherOrderType> higher_order_type_from_string(std::string_view name);

struct HigherOrderEntry {
  std::vector<std::string> columns;
  HigherOrderType type = HigherOrderType::FreeText;
  bool operator==(const HigherOrderEntry&) const = default;
};

struct HigherOrderAssignment {
  std::vector<HigherOrderEntry> entries;

  const HigherOrderEntry* entry_of(std::string_view column) const;
  std::optional<HigherOrderType> type_of(std::string_view column) const;
  // Multi-column entries (coordinate pairs).
  std::vector<HigherOrderEntry> groups() const;
  void merge(const HigherOrderAssignment& other);
  Json to_json() const;
  bool operator==(const HigherOrderAssignment&) const = default;
};

StepId classify_step(const context::LeafGroup& group);
StepId profile_step(ErrorKind kind, std::string_view target);
StepId review_step(ErrorKind kind, std::string_view target);

// Shows the LLM the first five rows of the group. Unassigned string columns
// become free text; a category is kept only if statistics confirm it.
HigherOrderAssignment classify_higher_order(const context::LeafGroup& group,
                                            const context::SemanticContext& ctx,
                                            const ColumnTable& table, llm::LlmClient& client);

// Table-level kinds see the table summary; column-level kinds also see the
// column summaries of the target's members. Throws KindNotApplicable.
SemProfile semantic_profile(ErrorKind kind, const stats::Target& target,
                            const context::SemanticContext& ctx, const ColumnTable& table,
                            llm::LlmClient& client);

// Whether the statistics warrant an LLM review:
//   Duplication    HasDuplicate
//   UniqueKey      ExpUnique and UniqueRatio != 1
//   MissingValue   MissingPercentage > 0
//   Dmv            CandidateDMV non-empty
//   ColumnType     CurrentType != ExpType
//   other kinds    always
// Throws std::invalid_argument when the kinds of stat and sem differ.
bool needs_review(const stats::StatPayload& stat, const SemProfile& sem);

// Gated-out cases return is_error=false with kNoDiscrepancy and no LLM call.
ReviewVerdict semantic_review(const stats::StatPayload& stat, const SemProfile& sem,
                              const ColumnTable& table, const context::SemanticContext* ctx,
                              llm::LlmClient& client);

}  // namespace cocoon::semantics
