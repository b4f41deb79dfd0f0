#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "compver/c_lexer.hpp"
#include "compver/contract.hpp"

namespace compver {

std::string_view to_string(ParseFailureReason r) {
  switch (r) {
    case ParseFailureReason::no_clauses: return "no_clauses";
    case ParseFailureReason::empty_clause: return "empty_clause";
    case ParseFailureReason::unbalanced: return "unbalanced";
    case ParseFailureReason::illegal_literal: return "illegal_literal";
    case ParseFailureReason::quantifier: return "quantifier";
    case ParseFailureReason::unknown_identifier: return "unknown_identifier";
    case ParseFailureReason::return_value_in_requires: return "return_value_in_requires";
  }
  return "?";
}

std::string ParseFailure::message() const {
  std::string m(to_string(reason));
  if (!detail.empty()) m += ": " + detail;
  return m;
}

namespace {

enum class ClauseKind { requires_, ensures, assigns, invariant };

struct RawClause {
  ClauseKind kind;
  std::string text;
};

constexpr std::array<std::pair<std::string_view, ClauseKind>, 4> kAnnotations{{
    {"__ESBMC_requires", ClauseKind::requires_},
    {"__ESBMC_ensures", ClauseKind::ensures},
    {"__ESBMC_assigns", ClauseKind::assigns},
    {"__ESBMC_loop_invariant", ClauseKind::invariant},
}};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Finds the closing paren for the '(' at `open`, skipping string and char
// literals. Returns npos when unbalanced.
std::size_t balanced_end(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' || c == '\'') {
      char q = c;
      for (++i; i < s.size() && s[i] != q; ++i)
        if (s[i] == '\\') ++i;
      continue;
    }
    if (c == '\n' && depth > 0 && i + 1 < s.size() && s[i + 1] == '\n') return npos;
    if (c == '(') ++depth;
    else if (c == ')' && --depth == 0) return i;
  }
  return npos;
}

std::optional<ParseFailure> extract(std::string_view reply, std::vector<RawClause>& out) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (reply[i] != '_' || (i > 0 && ident_char(reply[i - 1]))) continue;
    for (auto [name, kind] : kAnnotations) {
      if (reply.substr(i, name.size()) != name) continue;
      std::size_t j = i + name.size();
      if (j < reply.size() && ident_char(reply[j])) continue;
      while (j < reply.size() && (reply[j] == ' ' || reply[j] == '\t')) ++j;
      if (j >= reply.size() || reply[j] != '(') continue;   // a mention in prose
      auto close = balanced_end(reply, j);
      if (close == npos) return ParseFailure{ParseFailureReason::unbalanced, std::string(name)};
      out.push_back({kind, trim(reply.substr(j + 1, close - j - 1))});
      i = close;
      break;
    }
  }
  return std::nullopt;
}

bool builtin_name(std::string_view id) {
  return id.starts_with("__ESBMC_") || id.starts_with("__VERIFIER_") || id == "NULL";
}

std::optional<ParseFailure> validate(const RawClause& c, const FunctionInfo& f, const ProgramModel& model) {
  if (c.text.empty()) return ParseFailure{ParseFailureReason::empty_clause, ""};
  auto toks = tokenize_code(c.text);
  {
    int depth = 0;
    for (const auto& t : toks) {
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      else if (t.is(")") || t.is("]") || t.is("}")) --depth;
      if (depth < 0) break;
    }
    if (depth != 0) return ParseFailure{ParseFailureReason::unbalanced, c.text};
  }
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.is("true") || t.is("false"))
      return ParseFailure{ParseFailureReason::illegal_literal, std::string(t.text) + " in `" + c.text + "`"};
    if (t.is("\\") || t.is("forall") || t.is("exists") || t.is("__ESBMC_forall") || t.is("__ESBMC_exists"))
      return ParseFailure{ParseFailureReason::quantifier, c.text};
  }
  for (const auto& id : expression_identifiers(c.text)) {
    if (id == "__ESBMC_return_value" && c.kind == ClauseKind::requires_)
      return ParseFailure{ParseFailureReason::return_value_in_requires, c.text};
    if (builtin_name(id) || f.has_param(id)) continue;
    if (std::binary_search(model.file_scope_names.begin(), model.file_scope_names.end(), id)) continue;
    if (c.kind == ClauseKind::invariant && std::find(f.locals.begin(), f.locals.end(), id) != f.locals.end())
      continue;
    return ParseFailure{ParseFailureReason::unknown_identifier, id};
  }
  return std::nullopt;
}

void push_unique(std::vector<std::string>& v, std::string s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

}  // namespace

ContractParse parse_contract_text(std::string_view reply, const FunctionInfo& f, const ProgramModel& model) {
  std::vector<RawClause> raw;
  if (auto err = extract(reply, raw)) return *err;
  if (raw.empty()) return ParseFailure{ParseFailureReason::no_clauses, ""};

  Contract c;
  c.function_name = f.name;
  std::size_t next_loop = 0;
  for (auto& clause : raw) {
    if (clause.kind == ClauseKind::assigns) {
      // One annotation may list several targets.
      auto toks = tokenize_code(clause.text);
      std::vector<std::string> targets;
      int depth = 0;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= toks.size(); ++i) {
        bool at_end = i == toks.size();
        if (!at_end) {
          if (toks[i].is("(") || toks[i].is("[")) ++depth;
          else if (toks[i].is(")") || toks[i].is("]")) --depth;
        }
        if (at_end || (depth == 0 && toks[i].is(","))) {
          if (i > start)
            targets.push_back(trim(std::string_view(clause.text)
                                       .substr(toks[start].offset, toks[i - 1].end() - toks[start].offset)));
          start = i + 1;
        }
      }
      if (targets.empty()) continue;   // __ESBMC_assigns() : nothing modified
      for (auto& target : targets) {
        RawClause one{ClauseKind::assigns, target};
        if (auto err = validate(one, f, model)) return *err;
        push_unique(c.assigns, std::move(target));
      }
      continue;
    }
    if (auto err = validate(clause, f, model)) return *err;
    switch (clause.kind) {
      case ClauseKind::requires_: push_unique(c.preconditions, std::move(clause.text)); break;
      case ClauseKind::ensures: push_unique(c.postconditions, std::move(clause.text)); break;
      case ClauseKind::invariant:
        if (next_loop < f.loops.size()) c.loop_invariants[next_loop++] = std::move(clause.text);
        break;
      case ClauseKind::assigns: break;
    }
  }
  if (c.empty()) return ParseFailure{ParseFailureReason::no_clauses, "only empty assigns"};
  return c;
}

}  // namespace compver
