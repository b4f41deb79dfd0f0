#include "compver/contract.hpp"

#include "compver/c_lexer.hpp"

namespace compver {

std::string_view to_string(ContractOrigin o) {
  switch (o) {
    case ContractOrigin::llm_precise: return "llm_precise";
    case ContractOrigin::llm_abstraction: return "llm_abstraction";
    case ContractOrigin::heuristic_fallback: return "heuristic_fallback";
    case ContractOrigin::delta_reduced: return "delta_reduced";
    case ContractOrigin::cegis: return "cegis";
  }
  return "?";
}

bool Contract::empty() const {
  return preconditions.empty() && postconditions.empty() && assigns.empty() && loop_invariants.empty();
}

std::string Contract::text() const {
  std::string out;
  for (const auto& r : preconditions) out += "__ESBMC_requires(" + r + ");\n";
  for (const auto& a : assigns) out += "__ESBMC_assigns(" + a + ");\n";
  for (const auto& e : postconditions) out += "__ESBMC_ensures(" + e + ");\n";
  for (const auto& [ordinal, inv] : loop_invariants)
    out += "__ESBMC_loop_invariant(" + inv + ");  // loop " + std::to_string(ordinal) + "\n";
  return out;
}

bool Contract::same_clauses(const Contract& o) const {
  return function_name == o.function_name && preconditions == o.preconditions &&
         postconditions == o.postconditions && assigns == o.assigns && loop_invariants == o.loop_invariants;
}

void to_json(nlohmann::json& j, const Contract& c) {
  nlohmann::json inv = nlohmann::json::object();
  for (const auto& [k, v] : c.loop_invariants) inv[std::to_string(k)] = v;
  j = nlohmann::json{{"function", c.function_name},
                     {"requires", c.preconditions},
                     {"ensures", c.postconditions},
                     {"assigns", c.assigns},
                     {"loop_invariants", inv},
                     {"origin", to_string(c.origin)}};
}

bool is_dereference_target(std::string_view lvalue) {
  auto toks = tokenize_code(lvalue);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].is("->")) return true;
    if (!toks[i].is("*")) continue;
    if (i == 0) return true;
    const auto& prev = toks[i - 1];
    bool operand_before = prev.is_identifier() || prev.kind == TokenKind::number || prev.is(")") || prev.is("]");
    if (!operand_before) return true;
  }
  return false;
}

SanitizeResult sanitize_assigns(Contract c) {
  SanitizeResult r;
  std::vector<std::string> kept;
  for (auto& a : c.assigns) {
    if (is_dereference_target(a)) r.stripped.push_back(std::move(a));
    else kept.push_back(std::move(a));
  }
  c.assigns = std::move(kept);
  r.contract = std::move(c);
  return r;
}

}  // namespace compver
