#pragma once

// Function contracts: the (requires, ensures, assigns) triple plus optional
// loop invariants, assigns sanitization, and parsing of contract text out of
// free-form model replies.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "compver/program_model.hpp"

namespace compver {

enum class ContractOrigin { llm_precise, llm_abstraction, heuristic_fallback, delta_reduced, cegis };

std::string_view to_string(ContractOrigin o);

struct Contract {
  std::string function_name;
  std::vector<std::string> preconditions;    // __ESBMC_requires
  std::vector<std::string> postconditions;   // __ESBMC_ensures
  std::vector<std::string> assigns;          // __ESBMC_assigns
  std::map<std::size_t, std::string> loop_invariants;   // loop ordinal -> predicate
  ContractOrigin origin = ContractOrigin::llm_precise;

  bool empty() const;
  /// Annotation lines, one per clause, in requires/assigns/ensures/invariant
  /// order. Stable; used for stagnation detection and prompts.
  std::string text() const;
  /// Same clauses, ignoring origin.
  bool same_clauses(const Contract& o) const;
  friend bool operator==(const Contract&, const Contract&) = default;
};

void to_json(nlohmann::json& j, const Contract& c);

/// Contracts keyed by function name.
using ContractSet = std::map<std::string, Contract>;

struct SanitizeResult {
  Contract contract;
  std::vector<std::string> stripped;
};

/// Removes assigns targets that dereference (`*p`, `p->f`, `(*p).f`).
/// Idempotent.
SanitizeResult sanitize_assigns(Contract c);

/// True when the lvalue text goes through a pointer dereference.
bool is_dereference_target(std::string_view lvalue);

enum class ParseFailureReason {
  no_clauses,
  empty_clause,
  unbalanced,
  illegal_literal,
  quantifier,
  unknown_identifier,
  return_value_in_requires,
};

std::string_view to_string(ParseFailureReason r);

struct ParseFailure {
  ParseFailureReason reason;
  std::string detail;
  std::string message() const;
};

using ContractParse = std::variant<Contract, ParseFailure>;

/// Extracts `__ESBMC_requires/ensures/assigns/loop_invariant(...)` clauses
/// from a reply (fenced or inline). Each clause must be a balanced C
/// expression naming only parameters, file-scope names, the function's
/// locals (invariants only) or ESBMC builtins. Never throws.
ContractParse parse_contract_text(std::string_view reply, const FunctionInfo& f, const ProgramModel& model);

}  // namespace compver
