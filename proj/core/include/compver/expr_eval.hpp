#pragma once

// A small evaluator for side-effect-free C integer expressions over a
// concrete valuation. Used to check candidate clauses against recorded
// example states.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace compver {

using ScalarOrArray = std::variant<std::int64_t, std::vector<std::int64_t>>;
using Valuation = std::map<std::string, ScalarOrArray, std::less<>>;

/// Integer literal in any C spelling (decimal, hex, octal, binary, char,
/// with or without u/l suffixes), optionally negated.
std::optional<std::int64_t> parse_c_integer(std::string_view text);

/// Canonical text for a trace value: whitespace removed, integer literals in
/// decimal, brace lists element-wise. Non-numeric text is kept verbatim
/// (minus whitespace).
std::string normalize_value(std::string_view text);

/// Parses a normalized or raw value text ("7", "0x1f", "{1, 2}") into a
/// scalar or array; nullopt when the text is not numeric.
std::optional<ScalarOrArray> parse_value(std::string_view text);

/// Evaluates `expr`. Returns nullopt when the expression references a name
/// missing from `env`, divides by zero, or uses an unsupported construct.
std::optional<std::int64_t> evaluate(std::string_view expr, const Valuation& env);

}  // namespace compver
