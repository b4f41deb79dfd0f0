#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "compver/pipeline.hpp"

namespace compver::detail {

// A system check on code where no contract stands in for a function
// reachable from main failed with a counterexample.
struct ConcreteRefutation {};

class Pipeline {
 public:
  Pipeline(const ProgramModel& model, const PipelineConfig& cfg, LlmClient& client, Verifier& verifier,
           const PromptTemplates& templates, Deadline deadline);

  PipelineResult run();

 private:
  const ProgramModel& model_;
  const PipelineConfig& cfg_;
  LlmClient& client_;
  Verifier& verifier_;
  const PromptTemplates& templates_;
  Deadline deadline_;

  RunLog log_;
  Synthesizer synth_;
  IceDatabase db_;
  std::optional<IceDatabase> cegis_db_;

  ContractSet contracts_;
  std::map<std::string, std::string> missing_;   // function -> why it has no contract
  std::optional<VerificationResult> system_;
  std::string system_text_;
  std::map<std::string, VerificationResult> functions_;
  std::map<std::string, std::string> function_texts_;
  std::map<std::string, std::string> diagnostics_;   // latest per function, plus kSystemEntry
  std::vector<Snapshot> history_;
  Stage stage_;
  std::size_t cegar_ = 0;
  std::size_t cegis_ = 0;
  bool concrete_checked_ = false;
  std::optional<std::string> weakest_;   // from the latest system counterexample

  // pipeline.cpp
  PipelineResult standard();
  PipelineResult refine_and_conclude();
  PipelineResult conclude(Outcome outcome);
  void enter(Stage s);
  void check_deadline() const;
  std::vector<std::string> function_names() const;

  void initial_synthesis(const std::vector<std::string>& names);
  void adopt(const std::string& f, const ContractParse& parsed);
  std::optional<Contract> synthesize_or_fallback(SynthesisRequest req, bool cegis);

  VerificationResult check_system(const ContractSet& contracts, std::string_view label);
  VerificationResult check_function(const std::string& f);
  bool verify_all();
  bool all_pass() const;
  std::vector<std::string> failing_functions() const;
  Snapshot snapshot() const;

  void absorb(IceDatabase& db, std::string_view provenance);
  std::vector<std::string> strengthen_targets(const std::set<std::string>& exclude) const;
  void cegar_refine();
  void cegis_synthesize_round();
  void delta_debug_stagnating();
  bool run_cegar();
  bool run_cegis();
  bool budget_left() const;

  // pre_abstraction.cpp
  PipelineResult pre_abstraction();
  void concurrent_synthesis(const std::vector<std::string>& names, bool abstraction, std::string_view phase);
};

}  // namespace compver::detail
