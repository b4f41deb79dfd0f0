#pragma once

// The verification pipeline: initial synthesis, system and function checks,
// surviving-contract re-check, CEGAR refinement with stagnation detection and
// delta debugging, CEGIS escalation, and the pre-abstraction strategy.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compver/contract.hpp"
#include "compver/ice.hpp"
#include "compver/llm_client.hpp"
#include "compver/program_model.hpp"
#include "compver/prompts.hpp"
#include "compver/run_log.hpp"
#include "compver/synthesis.hpp"
#include "compver/verifier.hpp"

namespace compver {

enum class Strategy { smart_ice, no_ice, pre_abstraction };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);   // accepts - or _

struct PipelineConfig {
  std::size_t k_cegar = 5;
  std::size_t k_cegis = 5;
  std::size_t total_budget = 10;
  double tau = 10.0;
  Strategy strategy = Strategy::smart_ice;
  double timeout_s = 600.0;          // whole-program wall clock, enforced by the harness
  std::size_t stagnation_window = 2;
  std::size_t workers = 1;           // concurrent synthesis calls in phases 1a/1b
  std::size_t diagnostic_limit = 10;
  SynthesisConfig synthesis;
};

enum class Outcome { verified, falsified, inconclusive };
enum class StageKind { initial, cegar, cegis, pre_abstraction };

std::string_view to_string(Outcome o);

struct Stage {
  StageKind kind = StageKind::initial;
  std::string phase;   // pre_abstraction only: 1a, 1b, 2, 3, 4, 5

  /// "initial", "cegar", "cegis" or "pre_abstraction_phase(5)".
  std::string label() const;
  friend bool operator==(const Stage&, const Stage&) = default;
};

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  Stage stage;
  std::size_t iterations_used = 0;
  std::size_t cegar_iterations = 0;
  std::size_t cegis_iterations = 0;
  std::optional<VerificationStatus> system_status;   // last system check
  std::map<std::string, VerificationStatus> per_function_status;
  ContractSet contracts;
  std::vector<std::string> stripped_assigns;          // "f: target"
};

nlohmann::json to_json_value(const Verdict& v);

struct PipelineResult {
  Verdict verdict;
  RunLog log;
  IceDatabase db;
};

/// One iteration's failure picture, used for stagnation detection.
struct Snapshot {
  std::vector<std::string> failing;                   // function names, "<system>" for the system check
  std::map<std::string, std::string> contract_texts;  // failing functions (all, when the system fails)
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

inline constexpr std::string_view kSystemEntry = "<system>";

/// True when the last `window` snapshots are identical.
bool detect_stagnation(const std::vector<Snapshot>& history, std::size_t window = 2);

/// Runs the configured strategy. Throws BackendNotFound and
/// DeadlineExceeded; every other failure is reported in the verdict.
PipelineResult run_pipeline(const ProgramModel& model, const PipelineConfig& cfg, LlmClient& client,
                            Verifier& verifier, const PromptTemplates& templates = PromptTemplates::builtin(),
                            Deadline deadline = {});

}  // namespace compver
