#pragma once

// Per-program runs under a wall-clock deadline, and suites of programs over a
// bounded worker pool with outcome totals and an iteration histogram.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compver/pipeline.hpp"

namespace compver {

enum class RunOutcome { converged, system_only, failed, timeout };

std::string_view to_string(RunOutcome o);

inline constexpr double kDefaultTimeoutS = 600.0;
inline constexpr double kVerifyThisTimeoutS = 900.0;

struct HarnessConfig {
  PipelineConfig pipeline;   // pipeline.timeout_s is the per-program deadline
  WeightTable weights;

  static HarnessConfig verifythis_profile();
};

/// Client and verifier for one program run. A null `templates` means the
/// built-in set.
struct Stack {
  std::shared_ptr<LlmClient> client;
  std::shared_ptr<Verifier> verifier;
  std::shared_ptr<const PromptTemplates> templates;
};

using StackFactory = std::function<Stack(const std::filesystem::path& program)>;

struct RunReport {
  std::string path;
  RunOutcome outcome = RunOutcome::failed;
  std::optional<Verdict> verdict;   // absent on timeout and setup errors
  std::size_t iterations = 0;
  std::string stage;
  std::vector<std::string> stripped_assigns;
  double wall_time_s = 0.0;
  std::string error;
  RunLog log;
};

/// verified -> converged; last system check passing with a function failing
/// -> system_only; anything else -> failed.
RunOutcome classify_outcome(const Verdict& v);

/// Never throws: setup errors become `failed` with `error` set, an elapsed
/// deadline becomes `timeout`.
RunReport run_program(const std::filesystem::path& path, const HarnessConfig& cfg, const StackFactory& stacks);

class EmptySuite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuiteReport {
  std::map<std::string, RunReport> per_program;
  std::map<RunOutcome, std::size_t> totals;
  std::map<std::size_t, std::size_t> iteration_histogram;   // converged programs only
  double wall_time_s = 0.0;

  bool all_converged() const;
};

/// The `.c` files directly inside `dir`, sorted.
std::vector<std::filesystem::path> suite_programs(const std::filesystem::path& dir);

/// Throws EmptySuite when `dir` holds no `.c` file.
SuiteReport run_suite(const std::filesystem::path& dir, const HarnessConfig& cfg, std::size_t workers,
                      const StackFactory& stacks);

/// Timing fields are omitted when `with_timing` is false, which makes
/// replay runs byte-comparable.
nlohmann::json to_json_value(const RunReport& r, bool with_timing = true, bool with_log = false);
nlohmann::json to_json_value(const SuiteReport& s, bool with_timing = true);

std::string summary_table(const SuiteReport& s);

}  // namespace compver
