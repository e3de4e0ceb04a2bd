#pragma once

// Source lines of the values in a JSON document, keyed by JSON pointer
// ("" for the root, "/flow/dt", "/domain/n/1", ...).

#include <map>
#include <string>
#include <string_view>

namespace netgrad::cli {

using LineMap = std::map<std::string, int>;

/// Expects text that already parsed as JSON; malformed input yields a partial map.
LineMap locate_values(std::string_view text);

/// Line and column (both 1-based) of a byte offset.
std::pair<int, int> line_column(std::string_view text, std::size_t offset);

}  // namespace netgrad::cli
