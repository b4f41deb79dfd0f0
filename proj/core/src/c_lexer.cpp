#include "compver/c_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace compver {

namespace {

constexpr std::array<std::string_view, 24> kMultiCharPuncts{
    ">>=", "<<=", "...", "==>", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=",  "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "^=", "|=", "##"};

constexpr std::array<std::string_view, 44> kKeywords{
    "auto",     "break",    "case",     "char",      "const",    "continue", "default",
    "do",       "double",   "else",     "enum",      "extern",   "float",    "for",
    "goto",     "if",       "inline",   "int",       "long",     "register", "restrict",
    "return",   "short",    "signed",   "sizeof",    "static",   "struct",   "switch",
    "typedef",  "union",    "unsigned", "void",      "volatile", "while",    "_Bool",
    "_Complex", "_Alignas", "_Alignof", "_Atomic",   "_Noreturn", "_Static_assert",
    "_Thread_local", "__inline", "__attribute__"};

constexpr std::array<std::string_view, 14> kTypeKeywords{
    "char",   "double", "float",  "int",    "long",  "short", "signed",
    "unsigned", "void", "_Bool",  "const",  "volatile", "struct", "union"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// True when position `i` is at the start of a line, ignoring leading blanks.
bool at_line_start(std::string_view s, std::size_t i) {
  while (i > 0) {
    char c = s[i - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
    --i;
  }
  return true;
}

}  // namespace

bool is_c_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_type_keyword(std::string_view word) {
  return std::find(kTypeKeywords.begin(), kTypeKeywords.end(), word) != kTypeKeywords.end();
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      auto close = s.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      continue;
    }
    std::size_t start = i;
    if (c == '#' && at_line_start(s, i)) {
      while (i < n) {
        if (s[i] == '\n') {
          std::size_t j = i;
          while (j > start && (s[j - 1] == '\r')) --j;
          if (j > start && s[j - 1] == '\\') {
            ++i;
            continue;
          }
          break;
        }
        ++i;
      }
      out.push_back({TokenKind::preprocessor, s.substr(start, i - start), start});
      continue;
    }
    if (ident_start(c)) {
      while (i < n && ident_char(s[i])) ++i;
      // Encoding prefixes on literals: L"..", u8"..", U'..'
      if (i < n && (s[i] == '"' || s[i] == '\'')) {
        auto word = s.substr(start, i - start);
        if (word == "L" || word == "u" || word == "U" || word == "u8") {
          c = s[i];
        } else {
          out.push_back({TokenKind::identifier, word, start});
          continue;
        }
      } else {
        out.push_back({TokenKind::identifier, s.substr(start, i - start), start});
        continue;
      }
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      std::size_t j = i + 1;
      while (j < n && s[j] != quote && s[j] != '\n') {
        if (s[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (j < n && s[j] == quote) ++j;
      i = j;
      out.push_back({quote == '"' ? TokenKind::string_literal : TokenKind::char_literal,
                     s.substr(start, i - start), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      ++i;
      while (i < n) {
        char d = s[i];
        if ((d == '+' || d == '-') && (s[i - 1] == 'e' || s[i - 1] == 'E' || s[i - 1] == 'p' ||
                                       s[i - 1] == 'P')) {
          ++i;
          continue;
        }
        if (ident_char(d) || d == '.') {
          ++i;
          continue;
        }
        break;
      }
      out.push_back({TokenKind::number, s.substr(start, i - start), start});
      continue;
    }
    std::size_t len = 1;
    for (auto p : kMultiCharPuncts) {
      if (s.substr(i, p.size()) == p) {
        len = p.size();
        break;
      }
    }
    out.push_back({TokenKind::punct, s.substr(i, len), i});
    i += len;
  }
  return out;
}

std::vector<Token> tokenize_code(std::string_view source) {
  auto toks = tokenize(source);
  std::erase_if(toks, [](const Token& t) { return t.kind == TokenKind::preprocessor; });
  return toks;
}

std::size_t match_bracket(const std::vector<Token>& toks, std::size_t open) {
  if (open >= toks.size()) return npos;
  std::string_view o = toks[open].text;
  std::string_view c;
  if (o == "(") c = ")";
  else if (o == "[") c = "]";
  else if (o == "{") c = "}";
  else return npos;
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::punct) continue;
    if (toks[i].text == o) ++depth;
    else if (toks[i].text == c) {
      if (--depth == 0) return i;
    }
  }
  return npos;
}

std::vector<std::string> expression_identifiers(std::string_view expr) {
  auto toks = tokenize_code(expr);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!toks[i].is_identifier() || is_c_keyword(toks[i].text)) continue;
    if (i > 0 && (toks[i - 1].is(".") || toks[i - 1].is("->"))) continue;
    std::string id(toks[i].text);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(std::move(id));
  }
  return ids;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace compver
