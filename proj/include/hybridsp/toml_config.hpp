#pragma once

#include "json.hpp"

#include <string>
#include <string_view>

namespace hybridsp::toml {

/// Parses the TOML subset used by scenario files into a JSON object:
/// comments, `[table]` and dotted `[a.b]` headers, bare/quoted/dotted keys,
/// basic and literal strings, integers, floats (incl. inf/nan), booleans and
/// (nested, multi-line) arrays. Inline tables, dates and multi-line strings
/// are rejected. Throws ConfigError with the offending line number.
nlohmann::json parse(std::string_view text);

/// Emits a JSON object as TOML. Scalars and arrays of a table come before
/// its sub-tables; floats keep 17 significant digits so parse(emit(t)) == t.
std::string emit(const nlohmann::json& table);

/// Parses a single TOML value (used for command-line overrides).
nlohmann::json parse_value(std::string_view text);

}  // namespace hybridsp::toml
