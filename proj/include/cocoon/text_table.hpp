#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cocoon/table.hpp"

namespace cocoon {

// Renders rows as a pipe-aligned text table for prompts. Nulls print as NULL;
// cells longer than `max_cell` are truncated with "...".
std::string render_text_table(std::span<const std::string> columns, std::span<const Row> rows,
                              std::size_t max_cell = 40);

// First `n` rows of `table` projected onto `columns`.
std::string render_projection(const ColumnTable& table, std::span<const std::string> columns,
                              std::size_t n);

}  // namespace cocoon
