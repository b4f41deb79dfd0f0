#pragma once

// Contract synthesis through an LLM client: prompt rendering, reply parsing
// with bounded retries, assigns sanitization, the coverage check used for
// precise contracts under pre-abstraction, and the heuristic fallback.

#include <cstddef>
#include <string>
#include <vector>

#include "compver/contract.hpp"
#include "compver/ice.hpp"
#include "compver/llm_client.hpp"
#include "compver/prompts.hpp"
#include "compver/run_log.hpp"

namespace compver {

struct SynthesisConfig {
  std::size_t parse_retries = 2;   // extra calls after a parse failure
  bool coverage_check = false;     // reject ensures that miss every relevant variable, once
};

/// Tautological ensures and the body-scanned write set (dereferencing
/// targets stripped and reported in `stripped`).
Contract heuristic_fallback(const FunctionInfo& f, const ProgramModel& model,
                            std::vector<std::string>* stripped = nullptr);

/// Variables an ensures clause of `f` should mention: parameters, the return
/// value, and globals read by the system property.
std::vector<std::string> coverage_variables(const FunctionInfo& f, const ProgramModel& model);
bool covers(const Contract& c, const std::vector<std::string>& vars);

/// Checks `c` against the examples of its function: every E+ state must
/// satisfy all evaluable clauses and no E- state may satisfy all of them.
/// Returns a description per violated example.
std::vector<std::string> example_violations(const Contract& c, const IceDatabase& db);

class Synthesizer {
 public:
  Synthesizer(LlmClient& client, const PromptTemplates& templates, RunLog* log = nullptr, SynthesisConfig cfg = {});

  /// Renders, asks, parses; on ParseFailure retries with the reason appended,
  /// up to the retry budget. The result is sanitized. Throws
  /// ClientUnavailable when the client cannot answer.
  ContractParse synthesize(const SynthesisRequest& req);

  /// Loose abstraction for a complex function; falls back to
  /// heuristic_fallback on any failure. Never throws ClientUnavailable.
  Contract overapproximate(const FunctionInfo& f, const ProgramModel& model);

  /// Example-conditioned synthesis. Replies inconsistent with `db` are kept
  /// but logged as example-inconsistent.
  ContractParse cegis_synthesize(const SynthesisRequest& req, const IceDatabase& db);

  const SynthesisConfig& config() const { return cfg_; }

 private:
  LlmClient& client_;
  PromptTemplates templates_;
  RunLog* log_;
  SynthesisConfig cfg_;

  void log(std::string_view kind, nlohmann::json fields);
};

}  // namespace compver
