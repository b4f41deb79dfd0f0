#include "compver/synthesis.hpp"

#include <algorithm>

#include "compver/c_lexer.hpp"
#include "compver/expr_eval.hpp"

namespace compver {

Contract heuristic_fallback(const FunctionInfo& f, const ProgramModel& model, std::vector<std::string>* stripped) {
  Contract c;
  c.function_name = f.name;
  c.postconditions = {"1"};
  c.assigns = scan_write_targets(model, f);
  c.origin = ContractOrigin::heuristic_fallback;
  auto s = sanitize_assigns(std::move(c));
  if (stripped) *stripped = std::move(s.stripped);
  return std::move(s.contract);
}

std::vector<std::string> coverage_variables(const FunctionInfo& f, const ProgramModel& model) {
  std::vector<std::string> vars;
  for (const auto& p : f.params) vars.push_back(p.name);
  if (f.returns_value()) vars.emplace_back("__ESBMC_return_value");
  for (const auto& id : expression_identifiers(model.property.assertion_text))
    if (model.is_global(id) && std::find(vars.begin(), vars.end(), id) == vars.end()) vars.push_back(id);
  return vars;
}

bool covers(const Contract& c, const std::vector<std::string>& vars) {
  if (vars.empty()) return true;
  for (const auto& e : c.postconditions)
    for (const auto& id : expression_identifiers(e))
      if (std::find(vars.begin(), vars.end(), id) != vars.end()) return true;
  return false;
}

namespace {

Valuation to_valuation(const ValuationText& v) {
  Valuation out;
  for (const auto& [k, text] : v)
    if (auto parsed = parse_value(text)) out.emplace(k, *parsed);
  return out;
}

ContractOrigin origin_for(Intent i) {
  switch (i) {
    case Intent::overapproximate: return ContractOrigin::llm_abstraction;
    case Intent::cegis: return ContractOrigin::cegis;
    default: return ContractOrigin::llm_precise;
  }
}

}  // namespace

std::vector<std::string> example_violations(const Contract& c, const IceDatabase& db) {
  std::vector<std::string> out;
  std::vector<std::string> clauses = c.preconditions;
  clauses.insert(clauses.end(), c.postconditions.begin(), c.postconditions.end());
  for (const auto& ex : db.positives_for(c.function_name)) {
    auto env = to_valuation(ex.valuation);
    for (const auto& cl : clauses) {
      auto v = evaluate(cl, env);
      if (v && *v == 0) out.push_back("E+ {" + render_valuation(ex.valuation) + "} violates `" + cl + "`");
    }
  }
  for (const auto& ex : db.negatives_for(c.function_name)) {
    auto env = to_valuation(ex.valuation);
    bool any = false;
    bool all_hold = true;
    for (const auto& cl : clauses) {
      auto v = evaluate(cl, env);
      if (!v) continue;
      any = true;
      if (*v == 0) all_hold = false;
    }
    if (any && all_hold) out.push_back("E- {" + render_valuation(ex.valuation) + "} is admitted by the contract");
  }
  return out;
}

Synthesizer::Synthesizer(LlmClient& client, const PromptTemplates& templates, RunLog* log, SynthesisConfig cfg)
    : client_(client), templates_(templates), log_(log), cfg_(cfg) {}

void Synthesizer::log(std::string_view kind, nlohmann::json fields) {
  if (log_) log_->event(kind, std::move(fields));
}

ContractParse Synthesizer::synthesize(const SynthesisRequest& request) {
  SynthesisRequest req = request;
  const auto& f = *req.function;
  const auto coverage = cfg_.coverage_check ? coverage_variables(f, *req.model) : std::vector<std::string>{};
  bool coverage_retried = false;
  std::size_t parse_failures = 0;
  for (std::size_t attempt = 1;; ++attempt) {
    auto prompt = templates_.render(req);
    ChatRequest chat{prompt, req.intent, f.name};
    auto reply = client_.complete(chat);
    auto parsed = parse_contract_text(reply.text, f, *req.model);
    nlohmann::json ev{{"function", f.name},
                      {"intent", to_string(req.intent)},
                      {"attempt", attempt},
                      {"prompt", prompt},
                      {"reply", reply.text}};
    if (auto* failure = std::get_if<ParseFailure>(&parsed)) {
      ev["result"] = "parse_failure";
      ev["reason"] = to_string(failure->reason);
      log("synthesis", std::move(ev));
      if (++parse_failures > cfg_.parse_retries) return *failure;
      req.retry_feedback = failure->message();
      continue;
    }
    auto contract = std::get<Contract>(std::move(parsed));
    contract.origin = origin_for(req.intent);
    auto sanitized = sanitize_assigns(std::move(contract));
    ev["result"] = "contract";
    ev["contract"] = sanitized.contract.text();
    log("synthesis", std::move(ev));
    if (!sanitized.stripped.empty())
      log("assigns_stripped", {{"function", f.name}, {"targets", sanitized.stripped}});
    if (cfg_.coverage_check && !covers(sanitized.contract, coverage)) {
      if (!coverage_retried) {
        coverage_retried = true;
        std::string names;
        for (const auto& v : coverage) names += (names.empty() ? "" : ", ") + v;
        req.retry_feedback = "the ensures clauses must mention at least one of: " + names;
        continue;
      }
      log("coverage_warning", {{"function", f.name}, {"contract", sanitized.contract.text()}});
    }
    return sanitized.contract;
  }
}

Contract Synthesizer::overapproximate(const FunctionInfo& f, const ProgramModel& model) {
  SynthesisRequest req;
  req.intent = Intent::overapproximate;
  req.function = &f;
  req.model = &model;
  std::string why;
  try {
    auto r = synthesize(req);
    if (auto* c = std::get_if<Contract>(&r)) return *c;
    why = std::get<ParseFailure>(r).message();
  } catch (const ClientUnavailable& e) {
    why = e.what();
  }
  std::vector<std::string> stripped;
  auto c = heuristic_fallback(f, model, &stripped);
  log("fallback", {{"function", f.name}, {"reason", why}, {"contract", c.text()}});
  if (!stripped.empty()) log("assigns_stripped", {{"function", f.name}, {"targets", stripped}});
  return c;
}

ContractParse Synthesizer::cegis_synthesize(const SynthesisRequest& req, const IceDatabase& db) {
  if (req.intent != Intent::cegis) throw std::invalid_argument("cegis_synthesize needs a cegis request");
  auto r = synthesize(req);
  if (auto* c = std::get_if<Contract>(&r)) {
    auto bad = example_violations(*c, db);
    if (!bad.empty()) log("example_inconsistent", {{"function", c->function_name}, {"violations", bad}});
  }
  return r;
}

}  // namespace compver
