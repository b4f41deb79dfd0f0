#include "compver/expr_eval.hpp"

#include <cctype>
#include <charconv>

#include "compver/c_lexer.hpp"

namespace compver {

std::optional<std::int64_t> parse_c_integer(std::string_view text) {
  std::string s = trim(text);
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = trim(std::string_view(s).substr(1));
  }
  if (s.empty()) return std::nullopt;
  if (s.size() >= 3 && s.front() == '\'' && s.back() == '\'') {
    std::string_view body(s.data() + 1, s.size() - 2);
    std::int64_t v = 0;
    if (body.size() == 1) v = static_cast<unsigned char>(body[0]);
    else if (body.size() == 2 && body[0] == '\\') {
      switch (body[1]) {
        case 'n': v = '\n'; break;
        case 't': v = '\t'; break;
        case 'r': v = '\r'; break;
        case '0': v = 0; break;
        case '\\': v = '\\'; break;
        case '\'': v = '\''; break;
        default: return std::nullopt;
      }
    } else {
      return std::nullopt;
    }
    return neg ? -v : v;
  }
  while (!s.empty() && (s.back() == 'u' || s.back() == 'U' || s.back() == 'l' || s.back() == 'L')) s.pop_back();
  int base = 10;
  std::string_view digits = s;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits.remove_prefix(2);
  } else if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'b' || digits[1] == 'B')) {
    base = 2;
    digits.remove_prefix(2);
  } else if (digits.size() > 1 && digits[0] == '0') {
    base = 8;
    digits.remove_prefix(1);
  }
  if (digits.empty()) return std::nullopt;
  std::uint64_t u = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), u, base);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  auto v = static_cast<std::int64_t>(u);
  return neg ? -v : v;
}

std::string normalize_value(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  if (auto v = parse_c_integer(compact)) return std::to_string(*v);
  if (compact.size() >= 2 && compact.front() == '{' && compact.back() == '}') {
    std::string out = "{";
    std::string_view inner(compact.data() + 1, compact.size() - 2);
    std::size_t start = 0;
    bool first = true;
    while (start <= inner.size()) {
      auto comma = inner.find(',', start);
      auto piece = inner.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (!first) out += ',';
      first = false;
      auto v = parse_c_integer(piece);
      out += v ? std::to_string(*v) : std::string(piece);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out + "}";
  }
  return compact;
}

std::optional<ScalarOrArray> parse_value(std::string_view text) {
  auto norm = normalize_value(text);
  if (auto v = parse_c_integer(norm)) return ScalarOrArray{*v};
  if (norm.size() >= 2 && norm.front() == '{' && norm.back() == '}') {
    std::vector<std::int64_t> elems;
    std::string_view inner(norm.data() + 1, norm.size() - 2);
    if (inner.empty()) return ScalarOrArray{elems};
    std::size_t start = 0;
    while (true) {
      auto comma = inner.find(',', start);
      auto v = parse_c_integer(inner.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (!v) return std::nullopt;
      elems.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return ScalarOrArray{elems};
  }
  return std::nullopt;
}

namespace {

// Precedence-climbing evaluator. Any failure collapses the whole result to
// nullopt; `ok_` records it so deeper calls can stop early.
class Evaluator {
 public:
  Evaluator(std::string_view expr, const Valuation& env) : toks_(tokenize_code(expr)), env_(env) {}

  std::optional<std::int64_t> run() {
    auto v = ternary();
    if (!ok_ || pos_ != toks_.size()) return std::nullopt;
    return v;
  }

 private:
  std::vector<Token> toks_;
  const Valuation& env_;
  std::size_t pos_ = 0;
  bool ok_ = true;

  bool peek(std::string_view p) const { return pos_ < toks_.size() && toks_[pos_].is(p); }
  bool accept(std::string_view p) {
    if (peek(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::int64_t fail() {
    ok_ = false;
    return 0;
  }

  std::int64_t ternary() {
    auto c = logical_or();
    if (!ok_) return 0;
    if (accept("?")) {
      auto a = ternary();
      if (!accept(":")) return fail();
      auto b = ternary();
      return c ? a : b;
    }
    return c;
  }

  std::int64_t logical_or() {
    auto v = logical_and();
    while (ok_ && accept("||")) {
      auto r = logical_and();
      v = (v || r) ? 1 : 0;
    }
    return v;
  }

  std::int64_t logical_and() {
    auto v = bit_or();
    while (ok_ && accept("&&")) {
      auto r = bit_or();
      v = (v && r) ? 1 : 0;
    }
    return v;
  }

  std::int64_t bit_or() {
    auto v = bit_xor();
    while (ok_ && accept("|")) v |= bit_xor();
    return v;
  }

  std::int64_t bit_xor() {
    auto v = bit_and();
    while (ok_ && accept("^")) v ^= bit_and();
    return v;
  }

  std::int64_t bit_and() {
    auto v = equality();
    while (ok_ && accept("&")) v &= equality();
    return v;
  }

  std::int64_t equality() {
    auto v = relational();
    while (ok_) {
      if (accept("==")) v = (v == relational());
      else if (accept("!=")) v = (v != relational());
      else break;
    }
    return v;
  }

  std::int64_t relational() {
    auto v = shift();
    while (ok_) {
      if (accept("<")) v = (v < shift());
      else if (accept("<=")) v = (v <= shift());
      else if (accept(">")) v = (v > shift());
      else if (accept(">=")) v = (v >= shift());
      else break;
    }
    return v;
  }

  std::int64_t shift() {
    auto v = additive();
    while (ok_) {
      if (accept("<<")) {
        auto r = additive();
        if (r < 0 || r > 62) return fail();
        v = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) << r);
      } else if (accept(">>")) {
        auto r = additive();
        if (r < 0 || r > 62) return fail();
        v >>= r;
      } else {
        break;
      }
    }
    return v;
  }

  std::int64_t additive() {
    auto v = multiplicative();
    while (ok_) {
      if (accept("+")) v += multiplicative();
      else if (accept("-")) v -= multiplicative();
      else break;
    }
    return v;
  }

  std::int64_t multiplicative() {
    auto v = unary();
    while (ok_) {
      if (accept("*")) {
        v *= unary();
      } else if (accept("/")) {
        auto r = unary();
        if (r == 0) return fail();
        v /= r;
      } else if (accept("%")) {
        auto r = unary();
        if (r == 0) return fail();
        v %= r;
      } else {
        break;
      }
    }
    return v;
  }

  std::int64_t unary() {
    if (accept("!")) return unary() == 0 ? 1 : 0;
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    if (accept("~")) return ~unary();
    // Cast: ( type-keywords... ) unary
    if (peek("(") && pos_ + 1 < toks_.size() && toks_[pos_ + 1].is_identifier() &&
        is_type_keyword(toks_[pos_ + 1].text)) {
      ++pos_;
      while (pos_ < toks_.size() && !toks_[pos_].is(")")) ++pos_;
      if (!accept(")")) return fail();
      return unary();
    }
    return postfix();
  }

  std::int64_t postfix() {
    if (pos_ >= toks_.size()) return fail();
    const auto& t = toks_[pos_];
    if (accept("(")) {
      auto v = ternary();
      if (!accept(")")) return fail();
      return v;
    }
    if (t.kind == TokenKind::number || t.kind == TokenKind::char_literal) {
      ++pos_;
      auto v = parse_c_integer(t.text);
      return v ? *v : fail();
    }
    if (t.is_identifier() && !is_c_keyword(t.text)) {
      ++pos_;
      auto it = env_.find(t.text);
      if (it == env_.end()) return fail();
      if (accept("[")) {
        auto idx = ternary();
        if (!accept("]")) return fail();
        auto* arr = std::get_if<std::vector<std::int64_t>>(&it->second);
        if (arr == nullptr || idx < 0 || static_cast<std::size_t>(idx) >= arr->size()) return fail();
        return (*arr)[static_cast<std::size_t>(idx)];
      }
      auto* scalar = std::get_if<std::int64_t>(&it->second);
      return scalar ? *scalar : fail();
    }
    return fail();
  }
};

}  // namespace

std::optional<std::int64_t> evaluate(std::string_view expr, const Valuation& env) {
  return Evaluator(expr, env).run();
}

}  // namespace compver
