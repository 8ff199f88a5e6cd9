#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cocoon {

// Pipeline step identifier, rendered "phase.kind" or "phase.kind:target".
// Phases: ctx, classify, stat, sem, review. The same strings key mock scripts.
struct StepId {
  std::string phase;
  std::string kind;
  std::string target;

  std::string str() const;
  static std::optional<StepId> parse(std::string_view text);

  auto operator<=>(const StepId&) const = default;
};

namespace phase {
inline constexpr std::string_view kContext = "ctx";
inline constexpr std::string_view kClassify = "classify";
inline constexpr std::string_view kStat = "stat";
inline constexpr std::string_view kSem = "sem";
inline constexpr std::string_view kReview = "review";
}  // namespace phase

}  // namespace cocoon
