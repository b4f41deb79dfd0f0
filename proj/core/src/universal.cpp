#include "compver/universal.hpp"

#include <algorithm>
#include <vector>

#include "compver/c_lexer.hpp"

namespace compver {

std::string UniversalEncoding::fragment() const { return index_decl + "\n" + assumption + "\n" + assertion; }

namespace {

using Toks = std::vector<Token>;

std::string compact(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out += c;
  return out;
}

std::string slice(std::string_view src, const Toks& t, std::size_t b, std::size_t e) {
  if (b >= e) return {};
  return std::string(src.substr(t[b].offset, t[e - 1].end() - t[b].offset));
}

// Top-level `==>` positions in [b, e).
std::vector<std::size_t> implications(const Toks& t, std::size_t b, std::size_t e) {
  std::vector<std::size_t> out;
  int depth = 0;
  for (std::size_t i = b; i < e; ++i) {
    if (t[i].is("(") || t[i].is("[")) ++depth;
    else if (t[i].is(")") || t[i].is("]")) --depth;
    else if (depth == 0 && t[i].is("==>")) out.push_back(i);
  }
  return out;
}

bool is_quantifier(const Toks& t, std::size_t i, std::string_view word) {
  return t[i].is(word) && i > 0 && t[i - 1].is("\\");
}

// Upper bound of a range over `var`: `0 <= v < B`, `v < B`, `0 <= v && v < B`,
// `v >= 0 && v < B`.
std::string range_bound(std::string_view src, const Toks& t, std::size_t b, std::size_t e, std::string_view var) {
  auto bad = [] { return UnsupportedQuantifierShape("range must read 0 <= i < bound"); };
  std::size_t lt = npos;
  for (std::size_t i = b; i + 1 < e; ++i)
    if (t[i].is(var) && t[i + 1].is("<")) lt = i + 1;
  if (lt == npos) throw bad();
  std::string lower = compact(slice(src, t, b, lt - 1));
  std::string v(var);
  if (!(lower.empty() || lower == "0<=" || lower == "0<=" + v + "&&" || lower == v + ">=0&&")) throw bad();
  if (lt + 1 >= e) throw bad();
  return slice(src, t, lt + 1, e);
}

}  // namespace

UniversalEncoding encode_universal_property(std::string_view property_text, std::string_view bound_var,
                                            std::string_view bound_expr, std::string_view index_type) {
  const auto t = tokenize_code(property_text);
  std::size_t forall = npos;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (is_quantifier(t, i, "exists") || t[i].is("__ESBMC_exists"))
      throw UnsupportedQuantifierShape("existential quantifier");
    if (is_quantifier(t, i, "forall") || t[i].is("__ESBMC_forall")) {
      if (forall != npos) throw UnsupportedQuantifierShape("nested quantifiers");
      forall = i;
    }
  }

  UniversalEncoding enc;
  std::size_t body_b = 0;
  if (forall != npos) {
    std::size_t q = t[forall].is("forall") ? forall - 1 : forall;
    if (q > 0) {
      if (!t[q - 1].is("==>")) throw UnsupportedQuantifierShape("quantifier must be outermost");
      enc.guard = slice(property_text, t, 0, q - 1);
    }
    std::size_t semi = forall + 1;
    while (semi < t.size() && !t[semi].is(";")) ++semi;
    if (semi >= t.size() || semi == forall + 1 || !t[semi - 1].is(bound_var))
      throw UnsupportedQuantifierShape("quantified variable must be " + std::string(bound_var));
    auto arrows = implications(t, semi + 1, t.size());
    if (arrows.empty()) throw UnsupportedQuantifierShape("missing range implication");
    auto bound = range_bound(property_text, t, semi + 1, arrows.front(), bound_var);
    if (compact(bound) != compact(bound_expr))
      throw UnsupportedQuantifierShape("bound " + bound + " differs from " + std::string(bound_expr));
    body_b = arrows.front() + 1;
  } else {
    auto arrows = implications(t, 0, t.size());
    if (arrows.size() > 1) throw UnsupportedQuantifierShape("chained implications");
    if (arrows.size() == 1) {
      enc.guard = slice(property_text, t, 0, arrows.front());
      body_b = arrows.front() + 1;
    }
  }
  if (body_b >= t.size()) throw UnsupportedQuantifierShape("empty body");

  std::vector<std::string> taken;
  for (const auto& tok : t)
    if (tok.is_identifier() && !tok.is(bound_var)) taken.emplace_back(tok.text);
  for (const auto& id : expression_identifiers(bound_expr)) taken.push_back(id);
  enc.index_name = "idx";
  for (int n = 1; std::find(taken.begin(), taken.end(), enc.index_name) != taken.end(); ++n)
    enc.index_name = "idx_" + std::to_string(n);

  std::string body;
  std::size_t pos = t[body_b].offset;
  for (std::size_t i = body_b; i < t.size(); ++i) {
    bool member = i > 0 && (t[i - 1].is(".") || t[i - 1].is("->"));
    if (!t[i].is(bound_var) || member) continue;
    body.append(property_text.substr(pos, t[i].offset - pos));
    body += enc.index_name;
    pos = t[i].end();
  }
  body.append(property_text.substr(pos, t.back().end() - pos));
  enc.body = trim(body);
  enc.guard = trim(enc.guard);

  enc.index_decl = std::string(index_type) + " " + enc.index_name + ";";
  enc.assumption = "__ESBMC_assume(" + enc.index_name + " < " + trim(bound_expr) + ");";
  enc.assertion = (enc.guard.empty() ? "" : "if (" + enc.guard + ") ") + "assert(" + enc.body + ");";
  return enc;
}

}  // namespace compver
