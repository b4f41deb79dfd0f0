#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "compver/c_lexer.hpp"

namespace compver::detail {

using Toks = std::vector<Token>;

/// One past the last token of the statement starting at token `i`.
std::size_t statement_end(const Toks& t, std::size_t i, std::size_t limit);

bool is_assignment_op(const Token& t);
std::set<std::string> updated_identifiers(const Toks& t, std::size_t b, std::size_t e);
std::vector<std::pair<std::size_t, std::size_t>> split_top(const Toks& t, std::size_t b, std::size_t e,
                                                           std::string_view sep);
std::string join_tokens(const Toks& t, std::size_t b, std::size_t e);
std::string source_text(std::string_view src, const Toks& t, std::size_t b, std::size_t e);

}  // namespace compver::detail
