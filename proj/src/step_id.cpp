#include "cocoon/step_id.hpp"

namespace cocoon {

std::string StepId::str() const {
  std::string out = phase + "." + kind;
  if (!target.empty()) out += ":" + target;
  return out;
}

std::optional<StepId> StepId::parse(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0) return std::nullopt;
  StepId id;
  id.phase = std::string(text.substr(0, dot));
  const auto rest = text.substr(dot + 1);
  const auto colon = rest.find(':');
  id.kind = std::string(rest.substr(0, colon));
  if (colon != std::string_view::npos) id.target = std::string(rest.substr(colon + 1));
  if (id.kind.empty()) return std::nullopt;
  return id;
}

}  // namespace cocoon
