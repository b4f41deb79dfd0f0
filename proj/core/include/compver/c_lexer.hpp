#pragma once

// Lexical scanner for preprocessed C translation units.
//
// The scanner never fails: unterminated comments and literals run to the end
// of the input. Comments are dropped; every other token keeps its byte offset
// in the original text so callers can splice annotations back into it.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace compver {

enum class TokenKind { identifier, number, string_literal, char_literal, punct, preprocessor };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;

  std::size_t end() const { return offset + text.size(); }
  bool is(std::string_view s) const { return kind != TokenKind::string_literal && text == s; }
  bool is_identifier() const { return kind == TokenKind::identifier; }
};

/// Tokenizes `source`. Token text views point into `source`, which must
/// outlive the returned vector.
std::vector<Token> tokenize(std::string_view source);

/// Same as tokenize() but drops preprocessor lines.
std::vector<Token> tokenize_code(std::string_view source);

bool is_c_keyword(std::string_view word);
bool is_type_keyword(std::string_view word);

/// Index of the token closing the bracket opened at `open`, or npos.
std::size_t match_bracket(const std::vector<Token>& toks, std::size_t open);

/// Identifier tokens of an expression, excluding member names after `.`/`->`.
std::vector<std::string> expression_identifiers(std::string_view expr);

std::string trim(std::string_view s);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

}  // namespace compver
