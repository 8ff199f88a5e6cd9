#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cocoon/context.hpp"
#include "cocoon/json.hpp"
#include "cocoon/llm.hpp"
#include "cocoon/table.hpp"

namespace fixtures {

std::filesystem::path data_dir();
cocoon::ColumnTable patients();
cocoon::llm::MockScript patients_script();
// Column-to-leaf layout of the patient fixture.
cocoon::context::AttributeHierarchy patients_hierarchy();
// Context assembled from the scripted answers of the patient fixture.
cocoon::context::SemanticContext patients_context();

// Mock provider plus a client over it with zero in-flight contention.
struct Mock {
  std::shared_ptr<cocoon::llm::MockProvider> provider;
  std::shared_ptr<cocoon::llm::LlmClient> client;
};
Mock mock_script(cocoon::llm::MockScript script, int max_retries = 3);
// Template so a braced list always picks the map overload below.
template <std::same_as<cocoon::llm::MockScript> S>
Mock mock(S script, int max_retries = 3) {
  return mock_script(std::move(script), max_retries);
}
Mock mock(const std::map<std::string, std::vector<std::string>>& responses, int max_retries = 3);

std::string fenced(const cocoon::Json& j);

// Script answering every LLM step of a full run over `table` with a single
// concept per column group. `copies` responses are scripted per step so the
// same steps can be re-run. Review verdicts are true for the step ids in
// `errors`, false otherwise.
struct ScriptOptions {
  std::vector<std::vector<std::string>> groups;  // leaf lists; default: one leaf
  std::vector<std::pair<std::vector<std::string>, std::string>> classify;  // columns, type
  std::set<std::string> errors;
  std::size_t copies = 1;
};
cocoon::llm::MockScript generic_script(const cocoon::ColumnTable& table,
                                       const ScriptOptions& options = {});
// Leaf ids of generic_script's hierarchy, in order ("Table/G0", ...).
std::string generic_leaf(std::size_t i);

// Random tables for property tests. Values come from small alphabets so
// duplicates and repeated values are common.
struct RandomTableSpec {
  std::size_t rows = 50;
  std::size_t columns = 3;
  std::size_t alphabet = 4;
  double null_rate = 0.15;
};
cocoon::ColumnTable random_table(std::mt19937_64& rng, const RandomTableSpec& spec);

}  // namespace fixtures
